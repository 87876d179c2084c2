#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpvault/attacks.hpp"
#include "fpvault/classic_vault.hpp"
#include "fpvault/descriptor_vault.hpp"
#include "fpvault/grid_vault.hpp"
#include "fpvault/minutia.hpp"
#include "fpvault/stats.hpp"

namespace fpvault {

// One impression on disk: finger<I>_imp<J>.txt plus optional sidecars
// finger<I>_imp<J>.transform.txt (ground-truth master->impression motion)
// and finger<I>_imp<J>.desc.txt (per-minutia descriptors).
struct ImpressionRecord {
    MinutiaeTemplate tmpl;
    RigidTransform transform; // identity when no sidecar was present
    bool hasTransform = false;
    std::vector<Descriptor> descriptors;
    std::string path;
};

struct FingerRecord {
    std::uint32_t fingerId = 0;
    std::vector<ImpressionRecord> impressions;
};

struct Dataset {
    std::vector<FingerRecord> fingers;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
};

// Loads finger<I>_imp<J>.txt (1-based, contiguous in both indices) from a
// directory. descriptorBits > 0 additionally requires a .desc.txt sidecar of
// that bit length per impression. Throws ParseError on malformed layouts.
Dataset loadDataset(const std::string& dir, std::size_t descriptorBits = 0);

enum class Scheme { Classic, Descriptor, Grid };
enum class DecoderKind { Exhaustive, Randomized };

struct EvalConfig {
    Scheme scheme = Scheme::Classic;
    ClassicVaultParams classicParams;
    GridParams gridParams;
    std::uint32_t bchLength = 511; // descriptor scheme: 511, 31 or 15
    DecoderKind decoder = DecoderKind::Exhaustive;
    std::uint64_t randomizedDraws = 65536;
    std::optional<std::uint64_t> budget; // exhaustive decoder subset budget
    std::uint64_t seed = 1;
    std::uint32_t workers = 1;
};

// FVC-style verification outcome. Genuine attempts pair impressions (i, j),
// i < j, of the same finger (impression i enrolls, j queries, aligned with
// the ground-truth motions); impostor attempts pair first impressions of
// fingers I < J without alignment. subGar restricts genuine attempts to the
// pair (1, 2). Enrollment failures count toward ftc and exclude the affected
// attempts.
struct EvaluationReport {
    TrialRecord gar;
    TrialRecord subGar;
    TrialRecord far;
    TrialRecord ftc;
    double genuineDecodeSeconds = 0.0;  // mean per genuine attempt
    double impostorDecodeSeconds = 0.0; // mean per impostor attempt
    std::uint64_t fingers = 0;
    std::uint64_t impressions = 0;
};

EvaluationReport runFvcProtocol(const Dataset& dataset, const EvalConfig& config);

// Unlocking-set statistics of the grid construction over the dataset's
// impostor first-impression pairs (A enrolls, B queries, t = |B|,
// omega = |A intersect B|), plus the randomized-decoder false-accept cost.
struct UnlockingStats {
    std::vector<UnlockingStatsEntry> entries;
    RandomizedDecoderCost cost;
};

UnlockingStats runUnlockingStats(const Dataset& dataset, const GridParams& params,
                                 std::uint64_t draws);

} // namespace fpvault

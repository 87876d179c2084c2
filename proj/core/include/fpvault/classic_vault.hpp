#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpvault/decode.hpp"
#include "fpvault/field.hpp"
#include "fpvault/minutia.hpp"

namespace fpvault {

struct ClassicVaultParams {
    std::uint32_t n = 224;  // total vault size (genuine + chaff)
    std::uint32_t tMin = 18;
    std::uint32_t tMax = 24;
    std::uint32_t k = 9;    // secret polynomial degree bound
    double separationThreshold = 25.0;
    double matchThreshold = 25.0;
};

// Published vault: minutiae sorted lexicographically by (a, b, theta) so the
// list order carries no enrollment information, with points[i].x encoding
// index i. Genuine points satisfy y = f(x); chaff ordinates avoid f(x).
struct ClassicVault {
    ClassicVaultParams params;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<Minutia> vaultMinutiae;
    std::vector<VaultPoint> points;
    SecretDigest digest;
};

// Enrollment output: the vault plus ground truth that is never published —
// which vault slots are genuine and which template minutia each came from
// (both parallel, ascending by vault index).
struct ClassicEnrollment {
    ClassicVault vault;
    std::vector<std::size_t> genuineVaultIndices;
    std::vector<std::size_t> genuineTemplateIndices;
};

// Hides `secret` (degree bound must equal params.k) in a vault built from
// the template's well-separated best-quality minutiae plus uniform chaff.
// Vault minutiae are quantized to 1/100 pixel / 1/100 degree so published
// vaults match their serialized form exactly.
// Throws FailureToCapture (too few well-separated minutiae), and
// ChaffPlacementFailure when chaff cannot be placed within budget.
ClassicEnrollment enrollClassic(const MinutiaeTemplate& tmpl, const ClassicVaultParams& params,
                                const Polynomial& secret, std::uint64_t seed);

// One matched query->vault correspondence inside an unlocking set.
struct UnlockingEntry {
    std::size_t vaultIndex;
    std::size_t queryIndex; // index into the query template's minutiae
    VaultPoint point;
};

struct UnlockingSet {
    std::vector<UnlockingEntry> entries;
    // Number of entries pointing at genuine vault slots; only available when
    // ground truth was supplied.
    std::optional<std::size_t> genuineCount;

    std::vector<VaultPoint> points() const
    {
        std::vector<VaultPoint> out;
        out.reserve(entries.size());
        for (const UnlockingEntry& e : entries)
            out.push_back(e.point);
        return out;
    }
};

// Builds the unlocking set for a query: selects up to tMax well-separated
// query minutiae (quality first) and matches each to its closest unclaimed
// vault minutia, keeping the pair iff the dissimilarity is within
// matchThreshold. Pass the enrollment's genuineVaultIndices to get
// genuineCount populated.
UnlockingSet buildUnlockingSet(const ClassicVault& vault, const MinutiaeTemplate& query,
                               const std::vector<std::size_t>* genuineVaultIndices = nullptr);

// Convenience: unlocking set + exhaustive decode against the vault digest.
DecodeOutcome unlockClassic(const ClassicVault& vault, const MinutiaeTemplate& query,
                            std::optional<std::uint64_t> budget = std::nullopt);

// Versioned big-endian binary format; round trips are byte-identical.
std::vector<std::uint8_t> serializeClassicVault(const ClassicVault& vault);
ClassicVault deserializeClassicVault(const std::vector<std::uint8_t>& blob);

} // namespace fpvault

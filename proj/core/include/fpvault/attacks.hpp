#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpvault/classic_vault.hpp"
#include "fpvault/decode.hpp"
#include "fpvault/field.hpp"
#include "fpvault/grid_vault.hpp"
#include "fpvault/minutia.hpp"

namespace fpvault {

struct AttackReport {
    bool success = false;
    std::uint64_t iterations = 0; // subset draws or queries consumed
    double wallSeconds = 0.0;
    double perCoreRate = 0.0; // iterations per second per worker
    std::optional<Polynomial> recoveredSecret;
    std::map<std::string, std::string> metadata;
};

// Naive brute force against a published point list: draw a uniform k-subset,
// interpolate, check the digest; repeat. Deterministic in `seed` (draw i uses
// its own derived stream) and scheduling-independent for any worker count:
// the reported iteration count is always the 1-based index of the earliest
// successful draw. The iteration rate is measured after a warm-up window.
AttackReport bruteForceAttack(const std::vector<VaultPoint>& points, std::size_t k,
                              const SecretDigest& digest, std::uint64_t seed,
                              std::uint64_t maxIterations, std::uint32_t workers = 1);

// False-accept attack: replays queries drawn from an impostor population
// against one authenticator until it opens the vault. The authenticator is
// whatever scheme configuration the caller wires in.
AttackReport falseAcceptAttack(
    const std::function<DecodeOutcome(const MinutiaeTemplate&)>& authenticate,
    const std::vector<MinutiaeTemplate>& queries);

// Expected wall-clock seconds for a false-accept attack to reach a 50%
// success chance: medianTrials(far) * secondsPerAttempt / workers.
double faCost(double far, double secondsPerAttempt, std::uint32_t workers);

// --- Correlation (record multiplicity) attack --------------------------------

struct CorrelationSearchParams {
    double rotationRangeDeg = 30.0; // search [-range, +range]
    double rotationStepDeg = 3.0;
    double pairThreshold = 25.0;    // final pairing dissimilarity gate
    double voteBinWidth = 25.0;     // translation accumulator bin width
    std::uint32_t refineCandidates = 8;
};

struct CorrelationResult {
    double score = 0.0; // matched pair count under the best motion
    std::vector<std::pair<std::size_t, std::size_t>> matchedPairs; // (indexA, indexB)
    RigidTransform bestTransform; // maps B's minutiae into A's frame
};

// Aligns two published minutiae lists over a rotation/translation search
// (translation candidates voted from minutia pairings, then the strongest
// bins refined with greedy one-to-one pairing). The identity motion is
// always among the refined candidates, so two vaults publishing identical
// minutiae lists score exactly their size.
CorrelationResult correlationScore(const std::vector<Minutia>& minutiaeA,
                                   const std::vector<Minutia>& minutiaeB, std::uint32_t width,
                                   std::uint32_t height,
                                   const CorrelationSearchParams& params = {});

// Cross-matching attack on two classic vaults believed to hide the same
// finger: correlate the minutiae lists, take A's points matched by the best
// alignment, and decode them against A's digest.
AttackReport correlationAttack(const ClassicVault& vaultA, const ClassicVault& vaultB,
                               std::optional<std::uint64_t> budget = std::nullopt,
                               const CorrelationSearchParams& params = {});

// Grid vaults publish the same abscissa universe, so the correlation attack
// degenerates to brute force over all of A's points.
AttackReport correlationAttack(const GridVault& vaultA, const GridVault& vaultB,
                               std::optional<std::uint64_t> budget = std::nullopt,
                               const CorrelationSearchParams& params = {});

// --- Randomized-decoder false-accept cost -------------------------------------

// Unlocking-set statistics of one impostor attempt: size t and genuine
// overlap omega.
struct UnlockingStatsEntry {
    std::uint32_t t = 0;
    std::uint32_t omega = 0;
};

struct RandomizedDecoderCost {
    double far = 0.0;             // mean decodeSuccessProbability over entries
    double medianAttempts = 0.0;  // medianTrials(far); +inf when far == 0
    double costIterations = 0.0;  // medianAttempts * draws per attempt
    double farSingleDraw = 0.0;   // same FAR at D = 1
    double costIterationsSingleDraw = 0.0; // the D = 1 lower bound
};

// Estimated false-accept cost of attacking the randomized decoder with D
// draws per attempt. By convexity the per-iteration efficiency is best at
// D = 1, so costIterations >= costIterationsSingleDraw.
RandomizedDecoderCost faCostRandomizedDecoder(const std::vector<UnlockingStatsEntry>& entries,
                                              std::uint32_t k, std::uint64_t draws);

} // namespace fpvault

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpvault/decode.hpp"
#include "fpvault/field.hpp"
#include "fpvault/hexgrid.hpp"
#include "fpvault/minutia.hpp"

namespace fpvault {

struct GridParams {
    double lambda = 29.0;     // hexagonal grid pitch in pixels
    std::uint32_t s = 6;      // direction quantization levels
    std::uint32_t width = 296;
    std::uint32_t height = 560;
    std::uint32_t tMax = 44;  // cap on extracted features
    std::uint32_t k = 7;      // secret polynomial degree bound
};

// Distinct feature labels of one impression, ascending.
struct FeatureSet {
    std::vector<std::uint32_t> labels;

    std::size_t size() const { return labels.size(); }
};

// Quantizes the template's minutiae in quality order, collecting distinct
// labels until tMax are found (or the minutiae run out).
FeatureSet extractFeatureSet(const MinutiaeTemplate& tmpl, const HexGrid& grid, std::uint32_t s,
                             std::uint32_t tMax);

// Grid vault: the abscissa list is the same fixed feature universe
// {0 .. r*s-1} for every enrollment, so published vaults differ only in
// their ordinates and two vaults cannot be linked through their point sets.
struct GridVault {
    GridParams params;
    std::vector<FieldElement> ordinates; // ordinate of feature e at index e
    SecretDigest digest;
};

struct GridEnrollment {
    GridVault vault;
    FeatureSet features; // ground truth, never published
};

// Hides `secret` (degree bound k) under the template's feature set: genuine
// features carry f(e), all others uniform ordinates != f(e).
// Throws FailureToCapture when fewer than k features are extracted, and
// std::domain_error when r * s exceeds the field order.
GridEnrollment gridEnroll(const MinutiaeTemplate& tmpl, const GridParams& params,
                          const Polynomial& secret, std::uint64_t seed);

// Randomized authentication: extracts the query's feature set B, forms the
// unlocking points {(e, ordinate[e]) : e in B} and runs `draws` uniform
// k-subset draws against the digest.
DecodeOutcome gridUnlock(const GridVault& vault, const MinutiaeTemplate& query,
                         std::uint64_t draws, std::uint64_t seed);

// Exhaustive variant over the same unlocking points.
DecodeOutcome gridUnlockExhaustive(const GridVault& vault, const MinutiaeTemplate& query,
                                   std::optional<std::uint64_t> budget = std::nullopt);

// Success probability of the randomized decoder when the unlocking set has
// t points of which omega are genuine: 1 - (1 - C(omega,k)/C(t,k))^D, and 0
// for omega < k.
double decodeSuccessProbability(std::uint32_t t, std::uint32_t omega, std::uint32_t k,
                                std::uint64_t draws);

// The vault minutiae a grid vault effectively publishes: one per feature
// label (grid position + direction bucket center). Identical for all vaults
// with the same parameters.
std::vector<Minutia> gridFeatureMinutiae(const GridParams& params);

// --- Parameter training ------------------------------------------------------

// One finger's impressions plus ground-truth motions (master -> impression).
struct GridTrainingSample {
    std::vector<MinutiaeTemplate> impressions;
    std::vector<RigidTransform> transforms; // parallel to impressions
};

struct GridSearchSpace {
    std::vector<double> lambdas;
    std::vector<std::uint32_t> directionLevels;
    std::vector<std::uint32_t> tMaxValues;
    std::vector<std::uint32_t> kValues;
    std::uint32_t width = 296;
    std::uint32_t height = 560;
};

struct GridScoreRow {
    GridParams params;
    std::uint32_t n = 0; // r * s
    double gar = 0.0;    // genuine pairs with |A ∩ B| >= k
    double far = 0.0;    // impostor first-impression pairs with |A ∩ B| >= k
    std::uint64_t genuinePairs = 0;
    std::uint64_t impostorPairs = 0;
};

struct GridTrainingResult {
    GridParams best;
    std::vector<GridScoreRow> table;
};

// Sweeps the search space and scores every configuration with the
// deterministic overlap criterion (success iff |A ∩ B| >= k): genuine pairs
// are aligned with the ground-truth motions, impostor pairs (first
// impressions, lower finger index enrolls) are not. The best configuration
// maximizes GAR, then minimizes FAR, then maximizes the security ratio
// k/tMax, preferring larger k, then smaller lambda, then smaller s.
GridTrainingResult trainParameters(const std::vector<GridTrainingSample>& fingers,
                                   const GridSearchSpace& space);

// Versioned big-endian binary format; round trips are byte-identical.
std::vector<std::uint8_t> serializeGridVault(const GridVault& vault);
GridVault deserializeGridVault(const std::vector<std::uint8_t>& blob);

} // namespace fpvault

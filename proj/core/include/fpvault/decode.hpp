#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpvault/field.hpp"

namespace fpvault {

enum class DecodeFailure {
    None,            // decode succeeded
    TooFewPoints,    // fewer than k points available
    BudgetExhausted, // subset budget spent without a digest match
    SearchExhausted, // every candidate subset tried, none matched
};

struct DecodeOutcome {
    std::optional<Polynomial> secret;
    std::uint64_t subsetsTried = 0;
    DecodeFailure failure = DecodeFailure::None;

    bool success() const { return secret.has_value(); }
};

// Exhaustive bounded decoder: sorts the points by abscissa, walks all
// k-subsets in lexicographic order, interpolates each candidate polynomial
// and accepts the first whose commitment matches `digest`. subsetsTried is
// the 1-based position of the accepting subset in that canonical order.
// Throws std::domain_error on duplicate abscissae.
DecodeOutcome decodeExhaustive(const std::vector<VaultPoint>& points, std::size_t k,
                               const SecretDigest& digest,
                               std::optional<std::uint64_t> budget = std::nullopt);

// Randomized decoder: performs exactly `draws` independent uniform k-subset
// draws (with replacement across draws), stopping early on a digest match.
// subsetsTried counts the draws consumed. Deterministic in `seed`; draw i
// uses its own derived stream, so outcomes are draw-order independent.
DecodeOutcome randomizedDecode(const std::vector<VaultPoint>& points, std::size_t k,
                               const SecretDigest& digest, std::uint64_t draws,
                               std::uint64_t seed);

} // namespace fpvault

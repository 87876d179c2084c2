#include "fpvault/decode.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "fpvault/rng.hpp"

namespace fpvault {

namespace {

void requireDistinctAbscissae(const std::vector<VaultPoint>& points, const char* who)
{
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i].x == points[j].x)
                throw std::domain_error(std::string(who) + ": duplicate abscissae");
}

} // namespace

DecodeOutcome decodeExhaustive(const std::vector<VaultPoint>& points, std::size_t k,
                               const SecretDigest& digest, std::optional<std::uint64_t> budget)
{
    DecodeOutcome out;
    if (k == 0)
        throw std::domain_error("decodeExhaustive: k must be positive");
    if (points.size() < k) {
        out.failure = DecodeFailure::TooFewPoints;
        return out;
    }
    requireDistinctAbscissae(points, "decodeExhaustive");

    std::vector<VaultPoint> sorted = points;
    std::sort(sorted.begin(), sorted.end(),
              [](VaultPoint p, VaultPoint q) { return p.x < q.x; });

    const std::size_t n = sorted.size();
    std::vector<std::size_t> comb(k);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    std::vector<VaultPoint> subset(k);

    for (;;) {
        if (budget && out.subsetsTried >= *budget) {
            out.failure = DecodeFailure::BudgetExhausted;
            return out;
        }
        for (std::size_t i = 0; i < k; ++i)
            subset[i] = sorted[comb[i]];
        ++out.subsetsTried;
        Polynomial candidate = lagrangeInterpolate(subset, k);
        if (polyHash(candidate) == digest) {
            out.secret = std::move(candidate);
            return out;
        }
        // Advance to the next combination in lexicographic order.
        std::size_t i = k;
        while (i-- > 0) {
            if (comb[i] != i + n - k) {
                ++comb[i];
                for (std::size_t j = i + 1; j < k; ++j)
                    comb[j] = comb[j - 1] + 1;
                break;
            }
            if (i == 0) {
                out.failure = DecodeFailure::SearchExhausted;
                return out;
            }
        }
    }
}

DecodeOutcome randomizedDecode(const std::vector<VaultPoint>& points, std::size_t k,
                               const SecretDigest& digest, std::uint64_t draws,
                               std::uint64_t seed)
{
    DecodeOutcome out;
    if (k == 0)
        throw std::domain_error("randomizedDecode: k must be positive");
    if (points.size() < k) {
        out.failure = DecodeFailure::TooFewPoints;
        return out;
    }
    requireDistinctAbscissae(points, "randomizedDecode");

    const std::size_t n = points.size();
    std::vector<std::size_t> scratch(n);
    std::vector<VaultPoint> subset(k);
    for (std::uint64_t draw = 0; draw < draws; ++draw) {
        Rng rng = Rng::fork(seed, draw);
        std::iota(scratch.begin(), scratch.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + rng.below(static_cast<std::uint32_t>(n - i));
            std::swap(scratch[i], scratch[j]);
            subset[i] = points[scratch[i]];
        }
        ++out.subsetsTried;
        Polynomial candidate = lagrangeInterpolate(subset, k);
        if (polyHash(candidate) == digest) {
            out.secret = std::move(candidate);
            return out;
        }
    }
    out.failure = DecodeFailure::BudgetExhausted;
    return out;
}

} // namespace fpvault

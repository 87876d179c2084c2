#include "fpvault/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace fpvault {

namespace {

using BigFloat = boost::multiprecision::cpp_bin_float_50;

BigFloat powInt(BigFloat base, std::uint64_t e)
{
    BigFloat result = 1;
    while (e) {
        if (e & 1)
            result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

// P(X <= s) for X ~ Binomial(N, p), exact up to the working precision. Sums
// whichever tail has fewer terms; successive terms come from the recurrence
// term_{j+1} = term_j * (N - j) / (j + 1) * p / (1 - p).
BigFloat binomialCdf(std::uint64_t s, std::uint64_t N, const BigFloat& p)
{
    if (p <= 0)
        return 1;
    if (p >= 1)
        return s >= N ? BigFloat(1) : BigFloat(0);
    if (s >= N)
        return 1;

    BigFloat q = 1 - p;
    auto tailSum = [&](std::uint64_t from, std::uint64_t to) {
        // sum_{j=from..to} C(N, j) p^j q^(N-j)
        BigFloat term = powInt(p, from) * powInt(q, N - from);
        BigFloat choose = 1;
        std::uint64_t m = from <= N - from ? from : N - from; // C(N,from) = C(N,N-from)
        for (std::uint64_t i = 1; i <= m; ++i) {
            choose *= BigFloat(N - m + i);
            choose /= BigFloat(i);
        }
        term *= choose;
        BigFloat sum = term;
        BigFloat ratio = p / q;
        for (std::uint64_t j = from; j < to; ++j) {
            term *= BigFloat(N - j) * ratio / BigFloat(j + 1);
            sum += term;
        }
        return sum;
    };

    if (s <= N - s - 1)
        return tailSum(0, s);
    return 1 - tailSum(s + 1, N);
}

} // namespace

double pointEstimate(const TrialRecord& record)
{
    if (record.trials == 0)
        throw std::domain_error("pointEstimate: no trials");
    if (record.successes > record.trials)
        throw std::domain_error("pointEstimate: successes exceed trials");
    return static_cast<double>(record.successes) / static_cast<double>(record.trials);
}

ConfidenceInterval clopperPearson(const TrialRecord& record, double level)
{
    if (record.trials == 0)
        throw std::domain_error("clopperPearson: no trials");
    if (record.successes > record.trials)
        throw std::domain_error("clopperPearson: successes exceed trials");
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("clopperPearson: level must be in (0, 1)");

    const std::uint64_t s = record.successes;
    const std::uint64_t N = record.trials;
    const BigFloat halfAlpha = (BigFloat(1) - BigFloat(level)) / 2;
    const double tolerance = 1e-10;

    ConfidenceInterval ci;
    ci.level = level;

    if (s == 0) {
        ci.lower = 0.0;
    } else {
        // P(X >= s | p) = 1 - cdf(s - 1, p) is increasing in p; find the
        // largest p where it is still <= alpha/2.
        double lo = 0.0, hi = 1.0;
        while (hi - lo > tolerance) {
            double mid = 0.5 * (lo + hi);
            BigFloat upperTail = 1 - binomialCdf(s - 1, N, BigFloat(mid));
            if (upperTail <= halfAlpha)
                lo = mid;
            else
                hi = mid;
        }
        ci.lower = lo;
    }

    if (s == N) {
        ci.upper = 1.0;
    } else {
        // P(X <= s | p) is decreasing in p; find the smallest p where it has
        // dropped to <= alpha/2.
        double lo = 0.0, hi = 1.0;
        while (hi - lo > tolerance) {
            double mid = 0.5 * (lo + hi);
            BigFloat lowerTail = binomialCdf(s, N, BigFloat(mid));
            if (lowerTail <= halfAlpha)
                hi = mid;
            else
                lo = mid;
        }
        ci.upper = hi;
    }
    return ci;
}

ConfidenceInterval ruleOfThree(std::uint64_t trials)
{
    if (trials == 0)
        throw std::domain_error("ruleOfThree: no trials");
    ConfidenceInterval ci;
    ci.level = 0.95;
    ci.lower = 0.0;
    ci.upper = 3.0 / static_cast<double>(trials);
    return ci;
}

double medianTrials(double p)
{
    if (!(p > 0.0) || p > 1.0)
        throw std::domain_error("medianTrials: p must be in (0, 1]");
    if (p == 1.0)
        return 1.0;
    return std::log(0.5) / std::log1p(-p);
}

} // namespace fpvault

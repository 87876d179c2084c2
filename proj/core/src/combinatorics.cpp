#include "fpvault/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fpvault {

BigInt binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    if (k > n - k)
        k = n - k;
    BigInt result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result *= (n - k + i);
        result /= i; // exact at every step: result is C(n-k+i, i)
    }
    return result;
}

double log2BigInt(const BigInt& x)
{
    if (x <= 0)
        throw std::domain_error("log2BigInt: argument must be positive");
    std::size_t bits = boost::multiprecision::msb(x);
    if (bits <= 62)
        return std::log2(x.convert_to<double>());
    BigInt shifted = x >> (bits - 52);
    return static_cast<double>(bits - 52) + std::log2(shifted.convert_to<double>());
}

double log2Rational(const BigInt& num, const BigInt& den)
{
    return log2BigInt(num) - log2BigInt(den);
}

BfSecurity bfSecurity(std::uint64_t n, std::uint64_t t, std::uint64_t k)
{
    if (k < 1 || k > t || t > n)
        throw std::domain_error("bfSecurity: need 1 <= k <= t <= n");
    BfSecurity out;
    out.numerator = binomial(n, k);
    out.denominator = binomial(t, k);
    out.log2Value = log2Rational(out.numerator, out.denominator);
    if (out.log2Value >= 1020.0) {
        out.value = std::numeric_limits<double>::infinity();
    } else if (boost::multiprecision::msb(out.denominator) < 1000) {
        BigInt quotient = out.numerator / out.denominator;
        BigInt remainder = out.numerator % out.denominator;
        // quotient and denominator both fit a double here; fold the
        // fractional part back in so small ratios come out exact.
        out.value = quotient.convert_to<double>() +
                    remainder.convert_to<double>() / out.denominator.convert_to<double>();
    } else {
        out.value = std::exp2(out.log2Value);
    }
    return out;
}

double expectedBfIterations(std::uint64_t n, std::uint64_t t, std::uint64_t k)
{
    BfSecurity bf = bfSecurity(n, t, k);
    if (bf.numerator == bf.denominator)
        return 1.0;
    double invBf = std::exp2(log2Rational(bf.denominator, bf.numerator));
    if (invBf <= 0.0)
        return std::numeric_limits<double>::infinity();
    return std::log(0.5) / std::log1p(-invBf);
}

} // namespace fpvault

#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace fpvault {

using BigInt = boost::multiprecision::cpp_int;

// Exact binomial coefficient C(n, k); 0 when k > n.
BigInt binomial(std::uint64_t n, std::uint64_t k);

// log2 of a positive big integer, accurate to double precision.
double log2BigInt(const BigInt& x);

// log2(num / den) for positive big integers.
double log2Rational(const BigInt& num, const BigInt& den);

// Security of naive brute force against a vault of n points of which t are
// genuine and any k genuine points recover the secret: the expected number
// of uniform k-subset draws per recovery attempt is C(n, k) / C(t, k).
struct BfSecurity {
    BigInt numerator;   // C(n, k)
    BigInt denominator; // C(t, k)
    double value = 0.0; // numerator / denominator as double (inf if huge)
    double log2Value = 0.0;
};

// Requires 1 <= k <= t <= n; throws std::domain_error otherwise.
BfSecurity bfSecurity(std::uint64_t n, std::uint64_t t, std::uint64_t k);

// Number of independent k-subset draws needed for a >= 50% success chance:
// log(0.5) / log(1 - bf^-1), with the degenerate bf == 1 case yielding 1.
double expectedBfIterations(std::uint64_t n, std::uint64_t t, std::uint64_t k);

} // namespace fpvault

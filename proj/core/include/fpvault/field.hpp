#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <vector>

#include "fpvault/rng.hpp"

namespace fpvault {

// GF(2^16) with reduction polynomial x^16 + x^12 + x^3 + x + 1 (0x1100B).
// The polynomial is primitive, so x generates the multiplicative group and
// multiplication / inversion reduce to log/antilog table lookups.
inline constexpr std::uint32_t kFieldModulus = 0x1100Bu;
inline constexpr std::uint32_t kFieldOrder = 65536u;

struct FieldElement {
    std::uint16_t value = 0;

    friend constexpr bool operator==(FieldElement, FieldElement) = default;
    friend constexpr auto operator<=>(FieldElement, FieldElement) = default;
};

FieldElement fieldAdd(FieldElement a, FieldElement b);
FieldElement fieldMul(FieldElement a, FieldElement b);
// Multiplicative inverse; throws std::domain_error for the zero element.
FieldElement fieldInv(FieldElement a);

// A point (x, y) with both coordinates in GF(2^16). Vaults publish lists of
// these; genuine points satisfy y = f(x) for the secret polynomial f.
struct VaultPoint {
    FieldElement x;
    FieldElement y;

    friend constexpr bool operator==(VaultPoint, VaultPoint) = default;
};

// Polynomial over GF(2^16) with an explicit degree bound: exactly k stored
// coefficients c0..c(k-1), lowest order first, leading zeros retained. Two
// polynomials are equal only if their degree bounds agree as well.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<FieldElement> coefficients)
        : coefficients_(std::move(coefficients))
    {
    }

    // Uniformly random polynomial of degree < k (each coefficient uniform).
    static Polynomial random(std::size_t k, Rng& rng);

    std::size_t degreeBound() const { return coefficients_.size(); }
    const std::vector<FieldElement>& coefficients() const { return coefficients_; }

    FieldElement evaluate(FieldElement x) const;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<FieldElement> coefficients_;
};

// Interpolates the unique polynomial of degree < k through exactly k points.
// Throws std::domain_error on duplicate abscissae or a point count != k.
Polynomial lagrangeInterpolate(const std::vector<VaultPoint>& points, std::size_t k);

struct SecretDigest {
    std::array<std::uint8_t, 20> bytes{};

    friend bool operator==(const SecretDigest&, const SecretDigest&) = default;
};

// Commitment to a secret polynomial: SHA-1 over the k coefficients, each
// serialized as a 2-byte big-endian word, lowest-order coefficient first.
SecretDigest polyHash(const Polynomial& f);

} // namespace fpvault

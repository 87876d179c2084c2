#include "fpvault/field.hpp"

#include <stdexcept>

#include "fpvault/sha1.hpp"

namespace fpvault {

namespace {

struct FieldTables {
    // antilog[i] = x^i for i in [0, 2*65535); doubled so products of two
    // logs index without a modular reduction.
    std::array<std::uint16_t, 131070> antilog;
    std::array<std::uint32_t, 65536> log; // log[0] unused

    FieldTables()
    {
        std::uint32_t v = 1;
        for (std::uint32_t i = 0; i < 65535; ++i) {
            antilog[i] = static_cast<std::uint16_t>(v);
            antilog[i + 65535] = static_cast<std::uint16_t>(v);
            log[v] = i;
            v <<= 1;
            if (v & 0x10000u)
                v ^= kFieldModulus;
        }
    }
};

const FieldTables& tables()
{
    static const FieldTables t;
    return t;
}

} // namespace

FieldElement fieldAdd(FieldElement a, FieldElement b)
{
    return {static_cast<std::uint16_t>(a.value ^ b.value)};
}

FieldElement fieldMul(FieldElement a, FieldElement b)
{
    if (a.value == 0 || b.value == 0)
        return {0};
    const FieldTables& t = tables();
    return {t.antilog[t.log[a.value] + t.log[b.value]]};
}

FieldElement fieldInv(FieldElement a)
{
    if (a.value == 0)
        throw std::domain_error("fieldInv: zero has no multiplicative inverse");
    const FieldTables& t = tables();
    return {t.antilog[65535 - t.log[a.value]]};
}

Polynomial Polynomial::random(std::size_t k, Rng& rng)
{
    std::vector<FieldElement> coeffs(k);
    for (auto& c : coeffs)
        c.value = static_cast<std::uint16_t>(rng.nextU64() >> 48);
    return Polynomial(std::move(coeffs));
}

FieldElement Polynomial::evaluate(FieldElement x) const
{
    FieldElement acc{0};
    for (std::size_t i = coefficients_.size(); i-- > 0;)
        acc = fieldAdd(fieldMul(acc, x), coefficients_[i]);
    return acc;
}

Polynomial lagrangeInterpolate(const std::vector<VaultPoint>& points, std::size_t k)
{
    if (points.size() != k)
        throw std::domain_error("lagrangeInterpolate: point count must equal the degree bound");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i].x == points[j].x)
                throw std::domain_error("lagrangeInterpolate: duplicate abscissae");

    // Accumulate y_i * prod_{j != i} (X - x_j) / (x_i - x_j) coefficient-wise.
    // Over GF(2^16) subtraction is addition, so (X - x_j) = (X + x_j).
    std::vector<FieldElement> result(k, FieldElement{0});
    std::vector<FieldElement> basis(k);
    for (std::size_t i = 0; i < k; ++i) {
        basis.assign(k, FieldElement{0});
        basis[0] = FieldElement{1};
        std::size_t degree = 0;
        FieldElement denom{1};
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i)
                continue;
            // basis *= (X + x_j)
            for (std::size_t d = degree + 1; d > 0; --d)
                basis[d] = fieldAdd(basis[d - 1], fieldMul(basis[d], points[j].x));
            basis[0] = fieldMul(basis[0], points[j].x);
            ++degree;
            denom = fieldMul(denom, fieldAdd(points[i].x, points[j].x));
        }
        FieldElement scale = fieldMul(points[i].y, fieldInv(denom));
        for (std::size_t d = 0; d < k; ++d)
            result[d] = fieldAdd(result[d], fieldMul(basis[d], scale));
    }
    return Polynomial(std::move(result));
}

SecretDigest polyHash(const Polynomial& f)
{
    std::vector<std::uint8_t> bytes;
    bytes.reserve(2 * f.degreeBound());
    for (FieldElement c : f.coefficients()) {
        bytes.push_back(static_cast<std::uint8_t>(c.value >> 8));
        bytes.push_back(static_cast<std::uint8_t>(c.value & 0xFF));
    }
    SecretDigest digest;
    digest.bytes = sha1(bytes);
    return digest;
}

} // namespace fpvault

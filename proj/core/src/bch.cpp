#include "fpvault/bch.hpp"

#include <stdexcept>

namespace fpvault {

namespace {

// Primitive polynomials over GF(2), indexed by field degree.
std::uint32_t primitivePolynomial(unsigned gfBits)
{
    switch (gfBits) {
    case 4:
        return 0x13; // x^4 + x + 1
    case 5:
        return 0x25; // x^5 + x^2 + 1
    case 9:
        return 0x211; // x^9 + x^4 + 1
    default:
        throw std::domain_error("BchCode: unsupported field degree");
    }
}

} // namespace

BchCode::BchCode(unsigned gfBits, unsigned correctable)
    : gfBits_(gfBits), n_((1u << gfBits) - 1), nu_(correctable)
{
    if (nu_ == 0 || 2 * nu_ >= n_)
        throw std::domain_error("BchCode: correctable count out of range");

    std::uint32_t poly = primitivePolynomial(gfBits);
    exp_.resize(2 * n_);
    log_.assign(n_ + 1, 0);
    std::uint32_t v = 1;
    for (std::uint32_t i = 0; i < n_; ++i) {
        exp_[i] = static_cast<std::uint16_t>(v);
        exp_[i + n_] = static_cast<std::uint16_t>(v);
        log_[v] = static_cast<std::uint16_t>(i);
        v <<= 1;
        if (v & (1u << gfBits))
            v ^= poly;
    }

    // Generator = product over cyclotomic cosets of {1..2nu} of the coset's
    // minimal polynomial. Minimal polynomials have GF(2) coefficients, so the
    // running product stays a bit vector.
    std::vector<std::uint8_t> gen{1};
    std::vector<bool> seen(n_, false);
    for (std::uint32_t e = 1; e <= 2 * nu_; ++e) {
        if (seen[e])
            continue;
        std::vector<std::uint32_t> coset;
        std::uint32_t c = e;
        do {
            seen[c] = true;
            coset.push_back(c);
            c = (2 * c) % n_;
        } while (c != e);

        // minimal polynomial = prod (x + alpha^c), coefficients in GF(2^m)
        std::vector<std::uint32_t> mp{1};
        for (std::uint32_t exponent : coset) {
            std::vector<std::uint32_t> next(mp.size() + 1, 0);
            std::uint32_t root = alphaPow(exponent);
            for (std::size_t d = 0; d < mp.size(); ++d) {
                next[d + 1] ^= mp[d];
                next[d] ^= fieldMul(mp[d], root);
            }
            mp = std::move(next);
        }
        for (std::uint32_t coeff : mp)
            if (coeff > 1)
                throw std::logic_error("BchCode: minimal polynomial not binary");

        std::vector<std::uint8_t> product(gen.size() + mp.size() - 1, 0);
        for (std::size_t i = 0; i < gen.size(); ++i) {
            if (!gen[i])
                continue;
            for (std::size_t j = 0; j < mp.size(); ++j)
                product[i + j] ^= static_cast<std::uint8_t>(mp[j]);
        }
        gen = std::move(product);
    }

    generator_ = std::move(gen);
    std::uint32_t genDegree = static_cast<std::uint32_t>(generator_.size() - 1);
    if (genDegree >= n_)
        throw std::domain_error("BchCode: generator degree exceeds code length");
    ell_ = n_ - genDegree;
    for (std::uint32_t d = 0; d <= genDegree; ++d)
        if (generator_[d])
            generatorSupport_.push_back(d);
}

const BchCode& BchCode::code511_19()
{
    static const BchCode code(9, 119);
    return code;
}

const BchCode& BchCode::code31_6()
{
    static const BchCode code(5, 7);
    return code;
}

const BchCode& BchCode::code15_5()
{
    static const BchCode code(4, 3);
    return code;
}

std::uint32_t BchCode::fieldMul(std::uint32_t a, std::uint32_t b) const
{
    if (a == 0 || b == 0)
        return 0;
    return exp_[log_[a] + log_[b]];
}

std::uint32_t BchCode::alphaPow(std::uint32_t e) const
{
    return exp_[e % n_];
}

std::vector<std::uint8_t> BchCode::encode(std::uint32_t message) const
{
    if (ell_ < 32 && message >= (1u << ell_))
        throw std::domain_error("BchCode::encode: message exceeds code dimension");
    const std::uint32_t parityLen = n_ - ell_;
    std::vector<std::uint8_t> word(n_, 0);
    for (std::uint32_t i = 0; i < ell_; ++i)
        word[parityLen + i] = static_cast<std::uint8_t>((message >> i) & 1u);

    // Remainder of x^parityLen * m(x) modulo the generator.
    std::vector<std::uint8_t> tmp = word;
    for (std::uint32_t pos = n_; pos-- > parityLen;) {
        if (!tmp[pos])
            continue;
        std::uint32_t offset = pos - parityLen;
        for (std::uint32_t d : generatorSupport_)
            tmp[offset + d] ^= 1;
    }
    for (std::uint32_t i = 0; i < parityLen; ++i)
        word[i] = tmp[i];
    return word;
}

std::optional<std::uint32_t> BchCode::decode(const std::vector<std::uint8_t>& word) const
{
    if (word.size() != n_)
        throw std::domain_error("BchCode::decode: wrong word length");

    std::vector<std::uint32_t> support;
    support.reserve(64);
    for (std::uint32_t i = 0; i < n_; ++i)
        if (word[i])
            support.push_back(i);

    // Syndromes S_j = r(alpha^j), j = 1..2nu. For binary words the even ones
    // follow from S_2j = S_j^2, so only odd j need the support sum.
    std::vector<std::uint32_t> synd(2 * nu_ + 1, 0);
    bool allZero = true;
    for (std::uint32_t j = 1; j <= 2 * nu_; j += 2) {
        std::uint32_t s = 0;
        for (std::uint32_t i : support)
            s ^= alphaPow(i * j);
        synd[j] = s;
        if (s)
            allZero = false;
    }
    for (std::uint32_t j = 2; j <= 2 * nu_; j += 2) {
        std::uint32_t h = synd[j / 2];
        synd[j] = fieldMul(h, h);
        if (synd[j])
            allZero = false;
    }

    auto extract = [&](const std::vector<std::uint8_t>& w) {
        std::uint32_t message = 0;
        const std::uint32_t parityLen = n_ - ell_;
        for (std::uint32_t i = 0; i < ell_; ++i)
            message |= static_cast<std::uint32_t>(w[parityLen + i]) << i;
        return message;
    };

    if (allZero)
        return extract(word);

    // Berlekamp-Massey for the error locator polynomial.
    std::vector<std::uint32_t> lambda{1};
    std::vector<std::uint32_t> prev{1};
    std::uint32_t L = 0;
    std::uint32_t shift = 1;
    std::uint32_t b = 1;
    for (std::uint32_t i = 0; i < 2 * nu_; ++i) {
        std::uint32_t delta = synd[i + 1];
        for (std::uint32_t j = 1; j <= L && j < lambda.size(); ++j)
            if (lambda[j] && i >= j)
                delta ^= fieldMul(lambda[j], synd[i + 1 - j]);

        if (delta == 0) {
            ++shift;
        } else if (2 * L <= i) {
            std::vector<std::uint32_t> tmp = lambda;
            std::uint32_t scale = fieldMul(delta, exp_[n_ - log_[b]]); // delta / b
            if (lambda.size() < prev.size() + shift)
                lambda.resize(prev.size() + shift, 0);
            for (std::size_t j = 0; j < prev.size(); ++j)
                if (prev[j])
                    lambda[j + shift] ^= fieldMul(scale, prev[j]);
            prev = std::move(tmp);
            L = i + 1 - L;
            b = delta;
            shift = 1;
        } else {
            std::uint32_t scale = fieldMul(delta, exp_[n_ - log_[b]]);
            if (lambda.size() < prev.size() + shift)
                lambda.resize(prev.size() + shift, 0);
            for (std::size_t j = 0; j < prev.size(); ++j)
                if (prev[j])
                    lambda[j + shift] ^= fieldMul(scale, prev[j]);
            ++shift;
        }
    }

    if (L > nu_)
        return std::nullopt;

    // Chien search over all positions; error at position i iff
    // lambda(alpha^(-i)) == 0. Abort early once too few candidate positions
    // remain to reach L roots.
    std::vector<std::uint32_t> errorPositions;
    errorPositions.reserve(L);
    for (std::uint32_t i = 0; i < n_; ++i) {
        if (errorPositions.size() + (n_ - i) < L)
            break;
        std::uint32_t x = exp_[(n_ - i) % n_]; // alpha^(-i)
        std::uint32_t acc = 0;
        std::uint32_t logx = log_[x];
        // Horner evaluation in the log domain.
        for (std::size_t d = lambda.size(); d-- > 0;) {
            if (acc)
                acc = exp_[log_[acc] + logx];
            acc ^= lambda[d];
        }
        if (acc == 0)
            errorPositions.push_back(i);
    }
    if (errorPositions.size() != L)
        return std::nullopt;

    std::vector<std::uint8_t> corrected = word;
    for (std::uint32_t pos : errorPositions)
        corrected[pos] ^= 1;

    // Re-verify: the corrected word must be a codeword. This pins down the
    // bounded-distance guarantee regardless of syndrome pathologies.
    for (std::uint32_t j = 1; j <= 2 * nu_; j += 2) {
        std::uint32_t s = 0;
        for (std::uint32_t i = 0; i < n_; ++i)
            if (corrected[i])
                s ^= alphaPow(i * j);
        if (s)
            return std::nullopt;
    }
    return extract(corrected);
}

std::uint32_t BchCode::hammingDistance(const std::vector<std::uint8_t>& a,
                                       const std::vector<std::uint8_t>& b)
{
    if (a.size() != b.size())
        throw std::domain_error("hammingDistance: length mismatch");
    std::uint32_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += (a[i] != b[i]) ? 1u : 0u;
    return d;
}

} // namespace fpvault

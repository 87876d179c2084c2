#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace fpvault {

// Shape of a binary block code used for ordinate hardening.
struct BinaryCodeSpec {
    std::uint32_t length = 0;      // codeword bits (2^gfBits - 1)
    std::uint32_t dimension = 0;   // message bits
    std::uint32_t correctable = 0; // guaranteed correctable bit errors
};

// Narrow-sense binary BCH code built at runtime: the generator polynomial is
// the product of the minimal polynomials of alpha^1 .. alpha^(2*correctable)
// over GF(2^gfBits). Decoding is strictly bounded-distance: a message comes
// back iff the word lies within `correctable` bit flips of a codeword.
class BchCode {
public:
    BchCode(unsigned gfBits, unsigned correctable);

    // The three standard instances used by the descriptor-hardened vault.
    static const BchCode& code511_19(); // length 511, dimension 19, corrects 119
    static const BchCode& code31_6();   // length 31,  dimension 6,  corrects 7
    static const BchCode& code15_5();   // length 15,  dimension 5,  corrects 3

    BinaryCodeSpec spec() const { return {n_, ell_, nu_}; }
    std::uint32_t length() const { return n_; }
    std::uint32_t dimension() const { return ell_; }
    std::uint32_t correctable() const { return nu_; }

    // Generator polynomial bits, lowest degree first (size length-dimension+1).
    const std::vector<std::uint8_t>& generator() const { return generator_; }

    // Systematic encoding: message bit i (LSB first) lands at codeword
    // position (length - dimension) + i. message must be < 2^dimension.
    std::vector<std::uint8_t> encode(std::uint32_t message) const;

    // word must have exactly `length` 0/1 entries.
    std::optional<std::uint32_t> decode(const std::vector<std::uint8_t>& word) const;

    // Hamming distance between two words of this code's length.
    static std::uint32_t hammingDistance(const std::vector<std::uint8_t>& a,
                                         const std::vector<std::uint8_t>& b);

private:
    std::uint32_t fieldMul(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t alphaPow(std::uint32_t e) const; // alpha^(e mod n)

    unsigned gfBits_;
    std::uint32_t n_;
    std::uint32_t ell_;
    std::uint32_t nu_;
    std::vector<std::uint16_t> exp_; // alpha^i for i in [0, 2n)
    std::vector<std::uint16_t> log_; // log[v] for v in [1, n]
    std::vector<std::uint8_t> generator_;
    std::vector<std::uint32_t> generatorSupport_;
};

} // namespace fpvault

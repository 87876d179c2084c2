#include "fpvault/sha1.hpp"

#include <cstring>

namespace fpvault {

namespace {

inline std::uint32_t rotl(std::uint32_t v, int bits)
{
    return (v << bits) | (v >> (32 - bits));
}

} // namespace

Sha1::Sha1()
    : state_{0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u}
{
}

void Sha1::update(const std::uint8_t* data, std::size_t len)
{
    totalBytes_ += len;
    while (len > 0) {
        std::size_t take = std::min(len, buffer_.size() - bufferLen_);
        std::memcpy(buffer_.data() + bufferLen_, data, take);
        bufferLen_ += take;
        data += take;
        len -= take;
        if (bufferLen_ == buffer_.size()) {
            processBlock(buffer_.data());
            bufferLen_ = 0;
        }
    }
}

void Sha1::update(const std::vector<std::uint8_t>& data)
{
    update(data.data(), data.size());
}

std::array<std::uint8_t, 20> Sha1::finish()
{
    std::uint64_t bitLen = totalBytes_ * 8;
    const std::uint8_t pad = 0x80;
    update(&pad, 1);
    const std::uint8_t zero = 0x00;
    while (bufferLen_ != 56)
        update(&zero, 1);

    std::uint8_t lenBytes[8];
    for (int i = 0; i < 8; ++i)
        lenBytes[i] = static_cast<std::uint8_t>(bitLen >> (56 - 8 * i));
    // Bypass update() for the length block: totalBytes_ is already consumed.
    std::memcpy(buffer_.data() + bufferLen_, lenBytes, 8);
    processBlock(buffer_.data());
    bufferLen_ = 0;

    std::array<std::uint8_t, 20> digest;
    for (int i = 0; i < 5; ++i) {
        digest[4 * i + 0] = static_cast<std::uint8_t>(state_[i] >> 24);
        digest[4 * i + 1] = static_cast<std::uint8_t>(state_[i] >> 16);
        digest[4 * i + 2] = static_cast<std::uint8_t>(state_[i] >> 8);
        digest[4 * i + 3] = static_cast<std::uint8_t>(state_[i]);
    }
    return digest;
}

void Sha1::processBlock(const std::uint8_t* block)
{
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i) {
        w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
               (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
    }
    for (int i = 16; i < 80; ++i)
        w[i] = rotl(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);

    std::uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3], e = state_[4];
    for (int i = 0; i < 80; ++i) {
        std::uint32_t f, k;
        if (i < 20) {
            f = (b & c) | (~b & d);
            k = 0x5A827999u;
        } else if (i < 40) {
            f = b ^ c ^ d;
            k = 0x6ED9EBA1u;
        } else if (i < 60) {
            f = (b & c) | (b & d) | (c & d);
            k = 0x8F1BBCDCu;
        } else {
            f = b ^ c ^ d;
            k = 0xCA62C1D6u;
        }
        std::uint32_t tmp = rotl(a, 5) + f + e + k + w[i];
        e = d;
        d = c;
        c = rotl(b, 30);
        b = a;
        a = tmp;
    }
    state_[0] += a;
    state_[1] += b;
    state_[2] += c;
    state_[3] += d;
    state_[4] += e;
}

std::array<std::uint8_t, 20> sha1(const std::uint8_t* data, std::size_t len)
{
    Sha1 h;
    h.update(data, len);
    return h.finish();
}

std::array<std::uint8_t, 20> sha1(const std::vector<std::uint8_t>& data)
{
    return sha1(data.data(), data.size());
}

std::string hexDigest(const std::array<std::uint8_t, 20>& digest)
{
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(40);
    for (std::uint8_t byte : digest) {
        out.push_back(hex[byte >> 4]);
        out.push_back(hex[byte & 0xF]);
    }
    return out;
}

} // namespace fpvault

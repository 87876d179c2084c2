#pragma once

// Private helpers for the versioned binary vault formats. Everything is
// big-endian and byte-packed so blobs are identical across platforms.

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "fpvault/errors.hpp"

namespace fpvault::wire {

inline void putU8(std::vector<std::uint8_t>& out, std::uint8_t v)
{
    out.push_back(v);
}

inline void putU16(std::vector<std::uint8_t>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void putU32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void putU64(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    putU32(out, static_cast<std::uint32_t>(v >> 32));
    putU32(out, static_cast<std::uint32_t>(v));
}

inline void putF64(std::vector<std::uint8_t>& out, double v)
{
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    putU64(out, bits);
}

class Reader {
public:
    Reader(const std::vector<std::uint8_t>& data, std::string context)
        : data_(data), context_(std::move(context))
    {
    }

    std::uint8_t u8()
    {
        need(1);
        return data_[pos_++];
    }

    std::uint16_t u16()
    {
        need(2);
        std::uint16_t v = (std::uint16_t(data_[pos_]) << 8) | std::uint16_t(data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32()
    {
        std::uint32_t hi = u16();
        return (hi << 16) | u16();
    }

    std::uint64_t u64()
    {
        std::uint64_t hi = u32();
        return (hi << 32) | u32();
    }

    double f64()
    {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    void bytes(std::uint8_t* dst, std::size_t len)
    {
        need(len);
        std::memcpy(dst, data_.data() + pos_, len);
        pos_ += len;
    }

    void expectEnd() const
    {
        if (pos_ != data_.size())
            throw ParseError(context_ + ": trailing bytes");
    }

private:
    void need(std::size_t n) const
    {
        if (pos_ + n > data_.size())
            throw ParseError(context_ + ": truncated blob");
    }

    const std::vector<std::uint8_t>& data_;
    std::string context_;
    std::size_t pos_ = 0;
};

// Shared format constants.
inline constexpr std::uint8_t kMagic[4] = {'F', 'P', 'V', 'T'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::uint8_t kSchemeClassic = 1;
inline constexpr std::uint8_t kSchemeDescriptor = 2;
inline constexpr std::uint8_t kSchemeGrid = 3;

inline void putMagic(std::vector<std::uint8_t>& out, std::uint8_t scheme)
{
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    putU8(out, kVersion);
    putU8(out, scheme);
}

inline void checkMagic(Reader& r, std::uint8_t scheme, const std::string& context)
{
    std::uint8_t magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw ParseError(context + ": bad magic");
    if (r.u8() != kVersion)
        throw ParseError(context + ": unsupported version");
    if (r.u8() != scheme)
        throw ParseError(context + ": wrong scheme tag");
}

} // namespace fpvault::wire

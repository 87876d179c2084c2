#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fpvault {

// Self-contained SHA-1 (FIPS 180-4). Used to commit to vault secrets so the
// decoders can recognise the correct polynomial without storing it.
class Sha1 {
public:
    Sha1();

    void update(const std::uint8_t* data, std::size_t len);
    void update(const std::vector<std::uint8_t>& data);

    // Finalizes and returns the 20-byte digest. The object must not be
    // updated afterwards.
    std::array<std::uint8_t, 20> finish();

private:
    void processBlock(const std::uint8_t* block);

    std::array<std::uint32_t, 5> state_;
    std::array<std::uint8_t, 64> buffer_;
    std::size_t bufferLen_ = 0;
    std::uint64_t totalBytes_ = 0;
};

std::array<std::uint8_t, 20> sha1(const std::uint8_t* data, std::size_t len);
std::array<std::uint8_t, 20> sha1(const std::vector<std::uint8_t>& data);

std::string hexDigest(const std::array<std::uint8_t, 20>& digest);

} // namespace fpvault

#include "fpvault/descriptor_vault.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "fpvault/combinatorics.hpp"
#include "fpvault/errors.hpp"
#include "wire.hpp"

namespace fpvault {

namespace {

std::vector<std::uint8_t> xorBits(const std::vector<std::uint8_t>& a,
                                  const std::vector<std::uint8_t>& b)
{
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] ^ b[i];
    return out;
}

} // namespace

DescriptorVault hardenVault(const ClassicEnrollment& e,
                            const std::vector<Descriptor>& genuineDescriptors,
                            const BchCode& code, std::uint64_t seed)
{
    const ClassicVault& v = e.vault;
    if (genuineDescriptors.size() != e.genuineVaultIndices.size())
        throw std::domain_error("hardenVault: need one descriptor per genuine vault minutia");
    for (const Descriptor& d : genuineDescriptors)
        if (d.bits.size() != code.length())
            throw std::domain_error("hardenVault: descriptor length != code length");

    DescriptorVault out;
    out.params = v.params;
    out.width = v.width;
    out.height = v.height;
    out.vaultMinutiae = v.vaultMinutiae;
    out.code = code.spec();
    out.digest = v.digest;
    out.entries.reserve(v.points.size());

    const std::uint32_t messageMask =
        code.dimension() >= 16 ? 0xFFFFu : ((1u << code.dimension()) - 1u);

    Rng rng(seed);
    std::size_t nextGenuine = 0;
    for (std::size_t i = 0; i < v.points.size(); ++i) {
        bool genuine = nextGenuine < e.genuineVaultIndices.size() &&
                       e.genuineVaultIndices[nextGenuine] == i;
        Descriptor w =
            genuine ? genuineDescriptors[nextGenuine] : randomDescriptor(code.length(), rng);
        if (genuine)
            ++nextGenuine;
        std::uint32_t message = v.points[i].y.value & messageMask;
        std::vector<std::uint8_t> codeword = code.encode(message);
        out.entries.push_back({v.points[i].x, xorBits(codeword, w.bits)});
    }
    return out;
}

std::vector<VaultPoint> recoverHardenedPoints(const DescriptorVault& vault,
                                              const MinutiaeTemplate& query,
                                              const std::vector<Descriptor>& queryDescriptors)
{
    if (vault.code.dimension < 16)
        throw std::domain_error(
            "recoverHardenedPoints: code dimension < 16 cannot reconstruct 16-bit ordinates");
    if (queryDescriptors.size() != query.minutiae.size())
        throw std::domain_error("recoverHardenedPoints: need one descriptor per query minutia");
    for (const Descriptor& d : queryDescriptors)
        if (d.bits.size() != vault.code.length)
            throw std::domain_error("recoverHardenedPoints: descriptor length != code length");

    const BchCode& code = bchForSpec(vault.code);

    std::vector<std::size_t> qsel = selectWellSeparatedIndices(
        query, 0, vault.params.tMax, vault.params.separationThreshold);

    std::vector<bool> claimed(vault.vaultMinutiae.size(), false);
    std::vector<VaultPoint> points;
    for (std::size_t qi : qsel) {
        const Minutia& qm = query.minutiae[qi];
        double best = std::numeric_limits<double>::infinity();
        std::size_t bestIdx = 0;
        for (std::size_t vi = 0; vi < vault.vaultMinutiae.size(); ++vi) {
            if (claimed[vi])
                continue;
            double d = minutiaeDissimilarity(qm, vault.vaultMinutiae[vi]);
            if (d < best) {
                best = d;
                bestIdx = vi;
            }
        }
        if (best > vault.params.matchThreshold)
            continue;
        claimed[bestIdx] = true;
        std::vector<std::uint8_t> word =
            xorBits(vault.entries[bestIdx].masked, queryDescriptors[qi].bits);
        std::optional<std::uint32_t> message = code.decode(word);
        if (!message || *message > 0xFFFFu)
            continue; // the commitment did not open; drop the entry
        points.push_back({vault.entries[bestIdx].x,
                          FieldElement{static_cast<std::uint16_t>(*message)}});
    }
    return points;
}

DecodeOutcome unlockHardened(const DescriptorVault& vault, const MinutiaeTemplate& query,
                             const std::vector<Descriptor>& queryDescriptors,
                             std::optional<std::uint64_t> budget)
{
    std::vector<VaultPoint> points = recoverHardenedPoints(vault, query, queryDescriptors);
    return decodeExhaustive(points, vault.params.k, vault.digest, budget);
}

double spherePackingDensity(const BinaryCodeSpec& code)
{
    if (code.length == 0 || code.dimension == 0 || code.dimension > code.length)
        throw std::domain_error("spherePackingDensity: malformed code spec");
    BigInt volume = 0;
    for (std::uint32_t j = 0; j <= code.correctable; ++j)
        volume += binomial(code.length, j);
    double log2Volume = log2BigInt(volume);
    double log2Rho = log2Volume + static_cast<double>(code.dimension) -
                     static_cast<double>(code.length);
    if (log2Volume < 1000.0) {
        // Exact path: the volume fits a double, and the scale is a power of 2.
        return volume.convert_to<double>() *
               std::exp2(static_cast<double>(code.dimension) -
                         static_cast<double>(code.length));
    }
    return std::exp2(log2Rho);
}

HardenedSecurity hardenedBruteForceSecurity(std::uint64_t n, std::uint64_t t, std::uint64_t k,
                                            double R, double rho)
{
    if (R < 1.0)
        throw std::domain_error("hardenedBruteForceSecurity: R must be >= 1");
    if (rho < 0.0 || rho > 1.0)
        throw std::domain_error("hardenedBruteForceSecurity: rho must be in [0, 1]");
    BfSecurity bf = bfSecurity(n, t, k);
    double S = 1.0 + (R - 1.0) * rho;
    HardenedSecurity out;
    out.log2Value = static_cast<double>(k) * std::log2(S) + bf.log2Value;
    out.value = out.log2Value < 1020.0 ? std::exp2(out.log2Value)
                                       : std::numeric_limits<double>::infinity();
    // Prefer the exact product when nothing overflows and rho is 0 (the
    // hardening multiplier degenerates to 1, so the value is exactly bf).
    if (rho == 0.0)
        out.value = bf.value;
    return out;
}

HardenedSecurity hardenedBruteForceSecurity(std::uint64_t n, std::uint64_t t, std::uint64_t k,
                                            double R, const BinaryCodeSpec& code)
{
    return hardenedBruteForceSecurity(n, t, k, R, spherePackingDensity(code));
}

DecouplingReport decoupleOrdinates(const DescriptorVault& vault,
                                   const std::vector<Descriptor>& pool, double R)
{
    for (const Descriptor& d : pool)
        if (d.bits.size() != vault.code.length)
            throw std::domain_error("decoupleOrdinates: descriptor length != code length");
    const BchCode& code = bchForSpec(vault.code);

    DecouplingReport out;
    out.rho = spherePackingDensity(vault.code);
    out.analyticCandidates = 1.0 + (static_cast<double>(pool.size()) - 1.0) * out.rho;
    out.candidateCounts.reserve(vault.entries.size());
    std::size_t total = 0;
    for (const MaskedEntry& entry : vault.entries) {
        std::size_t count = 0;
        for (const Descriptor& d : pool) {
            std::vector<std::uint8_t> word = xorBits(entry.masked, d.bits);
            if (code.decode(word))
                ++count;
        }
        out.candidateCounts.push_back(count);
        total += count;
    }
    out.meanCandidates = vault.entries.empty()
                             ? 0.0
                             : static_cast<double>(total) /
                                   static_cast<double>(vault.entries.size());
    double sPrime = (R - 1.0) * out.rho;
    out.attackSuccessProbability =
        -std::expm1(static_cast<double>(vault.entries.size()) * std::log1p(-sPrime));
    return out;
}

Descriptor randomDescriptor(std::size_t length, Rng& rng)
{
    Descriptor d;
    d.bits.resize(length);
    for (std::size_t i = 0; i < length; ++i)
        d.bits[i] = static_cast<std::uint8_t>(rng.nextU64() >> 63);
    return d;
}

Descriptor perturbDescriptor(const Descriptor& d, double flipRate, Rng& rng)
{
    Descriptor out = d;
    for (std::uint8_t& bit : out.bits)
        if (rng.unitReal() < flipRate)
            bit ^= 1;
    return out;
}

const BchCode& bchForSpec(const BinaryCodeSpec& spec)
{
    auto matches = [&](const BchCode& c) {
        return c.length() == spec.length && c.dimension() == spec.dimension &&
               c.correctable() == spec.correctable;
    };
    if (matches(BchCode::code511_19()))
        return BchCode::code511_19();
    if (matches(BchCode::code31_6()))
        return BchCode::code31_6();
    if (matches(BchCode::code15_5()))
        return BchCode::code15_5();

    // Fallback for non-standard but valid specs: build and cache.
    static std::mutex mutex;
    static std::map<std::pair<std::uint32_t, std::uint32_t>, std::unique_ptr<BchCode>> cache;
    std::uint32_t lengthPlusOne = spec.length + 1;
    if (lengthPlusOne == 0 || (lengthPlusOne & (lengthPlusOne - 1)) != 0)
        throw std::domain_error("bchForSpec: length must be 2^m - 1");
    unsigned gfBits = 0;
    while ((1u << gfBits) < lengthPlusOne)
        ++gfBits;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(spec.length, spec.correctable);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<BchCode>(gfBits, spec.correctable)).first;
    if (!(it->second->dimension() == spec.dimension))
        throw std::domain_error("bchForSpec: spec dimension does not match the BCH code");
    return *it->second;
}

std::vector<Descriptor> readDescriptors(const std::string& path, std::size_t expectedLength)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("readDescriptors: cannot open " + path);
    const std::size_t hexDigits = (expectedLength + 3) / 4;
    std::vector<Descriptor> out;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (line.empty())
            continue;
        if (line.size() != hexDigits)
            throw ParseError("readDescriptors: line " + std::to_string(lineNo) +
                             " has wrong length");
        Descriptor d;
        d.bits.assign(expectedLength, 0);
        for (std::size_t pos = 0; pos < line.size(); ++pos) {
            char c = line[pos];
            unsigned nibble;
            if (c >= '0' && c <= '9')
                nibble = static_cast<unsigned>(c - '0');
            else if (c >= 'a' && c <= 'f')
                nibble = static_cast<unsigned>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F')
                nibble = static_cast<unsigned>(c - 'A' + 10);
            else
                throw ParseError("readDescriptors: invalid hex at line " +
                                 std::to_string(lineNo));
            // Big-endian nibbles: first hex digit covers the top bits.
            std::size_t base = 4 * (hexDigits - 1 - pos);
            for (unsigned bit = 0; bit < 4; ++bit) {
                std::size_t index = base + bit;
                if (index >= expectedLength) {
                    if (nibble & (1u << bit))
                        throw ParseError("readDescriptors: excess bits set at line " +
                                         std::to_string(lineNo));
                    continue;
                }
                d.bits[index] = static_cast<std::uint8_t>((nibble >> bit) & 1u);
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

void writeDescriptors(const std::string& path, const std::vector<Descriptor>& descriptors)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("writeDescriptors: cannot open " + path);
    static const char* hex = "0123456789abcdef";
    for (const Descriptor& d : descriptors) {
        const std::size_t hexDigits = (d.bits.size() + 3) / 4;
        std::vector<unsigned> nibbles(hexDigits, 0);
        for (std::size_t i = 0; i < d.bits.size(); ++i)
            if (d.bits[i])
                nibbles[hexDigits - 1 - i / 4] |= 1u << (i % 4);
        std::string line;
        line.reserve(hexDigits);
        for (unsigned nibble : nibbles)
            line.push_back(hex[nibble]);
        out << line << "\n";
    }
    if (!out)
        throw ParseError("writeDescriptors: write failed for " + path);
}

std::vector<std::uint8_t> serializeDescriptorVault(const DescriptorVault& vault)
{
    if (vault.vaultMinutiae.size() != vault.params.n || vault.entries.size() != vault.params.n)
        throw std::domain_error("serializeDescriptorVault: inconsistent vault sizes");
    const std::size_t packedLen = (vault.code.length + 7) / 8;
    std::vector<std::uint8_t> out;
    out.reserve(64 + vault.params.n * (14 + 2 + packedLen) + 20);
    wire::putMagic(out, wire::kSchemeDescriptor);
    wire::putU32(out, vault.params.n);
    wire::putU32(out, vault.params.tMin);
    wire::putU32(out, vault.params.tMax);
    wire::putU32(out, vault.params.k);
    wire::putF64(out, vault.params.separationThreshold);
    wire::putF64(out, vault.params.matchThreshold);
    wire::putU32(out, vault.width);
    wire::putU32(out, vault.height);
    wire::putU16(out, static_cast<std::uint16_t>(vault.code.length));
    wire::putU16(out, static_cast<std::uint16_t>(vault.code.dimension));
    wire::putU16(out, static_cast<std::uint16_t>(vault.code.correctable));
    for (const Minutia& m : vault.vaultMinutiae) {
        wire::putU32(out, static_cast<std::uint32_t>(std::llround(m.a * 100.0)));
        wire::putU32(out, static_cast<std::uint32_t>(std::llround(m.b * 100.0)));
        wire::putU16(out, static_cast<std::uint16_t>(std::llround(m.theta * 100.0)));
    }
    for (const MaskedEntry& e : vault.entries) {
        wire::putU16(out, e.x.value);
        std::vector<std::uint8_t> packed(packedLen, 0);
        for (std::size_t i = 0; i < e.masked.size(); ++i)
            if (e.masked[i])
                packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
        out.insert(out.end(), packed.begin(), packed.end());
    }
    out.insert(out.end(), vault.digest.bytes.begin(), vault.digest.bytes.end());
    return out;
}

DescriptorVault deserializeDescriptorVault(const std::vector<std::uint8_t>& blob)
{
    wire::Reader r(blob, "descriptor vault");
    wire::checkMagic(r, wire::kSchemeDescriptor, "descriptor vault");
    DescriptorVault vault;
    vault.params.n = r.u32();
    vault.params.tMin = r.u32();
    vault.params.tMax = r.u32();
    vault.params.k = r.u32();
    vault.params.separationThreshold = r.f64();
    vault.params.matchThreshold = r.f64();
    vault.width = r.u32();
    vault.height = r.u32();
    vault.code.length = r.u16();
    vault.code.dimension = r.u16();
    vault.code.correctable = r.u16();
    if (vault.code.length == 0 || vault.code.dimension == 0 ||
        vault.code.dimension > vault.code.length || vault.code.correctable == 0)
        throw ParseError("descriptor vault: malformed code spec");
    vault.vaultMinutiae.resize(vault.params.n);
    for (Minutia& m : vault.vaultMinutiae) {
        m.a = r.u32() / 100.0;
        m.b = r.u32() / 100.0;
        m.theta = r.u16() / 100.0;
        m.quality = 0.0;
        if (m.theta >= 360.0)
            throw ParseError("descriptor vault: direction out of range");
    }
    const std::size_t packedLen = (vault.code.length + 7) / 8;
    vault.entries.resize(vault.params.n);
    for (MaskedEntry& e : vault.entries) {
        e.x.value = r.u16();
        std::vector<std::uint8_t> packed(packedLen);
        r.bytes(packed.data(), packedLen);
        e.masked.assign(vault.code.length, 0);
        for (std::size_t i = 0; i < e.masked.size(); ++i)
            e.masked[i] = static_cast<std::uint8_t>((packed[i / 8] >> (i % 8)) & 1u);
        // Padding bits beyond the code length must be zero.
        for (std::size_t i = vault.code.length; i < packedLen * 8; ++i)
            if ((packed[i / 8] >> (i % 8)) & 1u)
                throw ParseError("descriptor vault: nonzero padding bits");
    }
    r.bytes(vault.digest.bytes.data(), vault.digest.bytes.size());
    r.expectEnd();
    return vault;
}

} // namespace fpvault

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpvault/bch.hpp"
#include "fpvault/classic_vault.hpp"
#include "fpvault/decode.hpp"
#include "fpvault/field.hpp"
#include "fpvault/minutia.hpp"
#include "fpvault/rng.hpp"

namespace fpvault {

// Fixed-length binary minutia descriptor (one bit per entry, values 0/1).
struct Descriptor {
    std::vector<std::uint8_t> bits;

    friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

// One hardened vault entry: the point's abscissa plus the fuzzy commitment
// c(y) XOR w, where c(y) encodes the ordinate and w is the minutia's
// descriptor. The plain ordinate is not published.
struct MaskedEntry {
    FieldElement x;
    std::vector<std::uint8_t> masked;
};

struct DescriptorVault {
    ClassicVaultParams params;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<Minutia> vaultMinutiae;
    std::vector<MaskedEntry> entries; // parallel to vaultMinutiae
    BinaryCodeSpec code;
    SecretDigest digest;
};

// Binds every ordinate of a fresh classic enrollment to a descriptor.
// genuineDescriptors holds one descriptor per genuine vault minutia, aligned
// with e.genuineVaultIndices; chaff entries get uniform random descriptors.
// With code dimension >= 16 the full 16-bit ordinate is committed; smaller
// codes commit the ordinate's low `dimension` bits (such vaults support the
// decoupling statistics below but cannot reconstruct ordinates for unlock).
DescriptorVault hardenVault(const ClassicEnrollment& e,
                            const std::vector<Descriptor>& genuineDescriptors,
                            const BchCode& code, std::uint64_t seed);

// Authenticates a query against a hardened vault: matches query minutiae to
// vault minutiae exactly like the classic unlocking set, then uses each
// matched query minutia's descriptor to unmask the entry. Entries whose
// fuzzy commitment does not decode are discarded; the surviving points feed
// the exhaustive decoder. queryDescriptors is aligned with query.minutiae.
// Requires code dimension >= 16.
DecodeOutcome unlockHardened(const DescriptorVault& vault, const MinutiaeTemplate& query,
                             const std::vector<Descriptor>& queryDescriptors,
                             std::optional<std::uint64_t> budget = std::nullopt);

// The point-recovery stage of unlockHardened without the final decode:
// matched entries whose commitments open under the query's descriptors.
std::vector<VaultPoint> recoverHardenedPoints(const DescriptorVault& vault,
                                              const MinutiaeTemplate& query,
                                              const std::vector<Descriptor>& queryDescriptors);

// Fraction of the descriptor space within decoding distance of a codeword:
// 2^(dimension - length) * sum_{j <= correctable} C(length, j).
double spherePackingDensity(const BinaryCodeSpec& code);

struct HardenedSecurity {
    double value;     // may be +inf when it exceeds double range
    double log2Value;
};

// Brute-force security of a hardened vault under descriptor guessing: each
// of the k subset ordinates must also be unmasked, which succeeds for a
// random guess with probability rho per entry; with R plausible descriptor
// candidates per minutia the per-entry cost multiplier is
// S = 1 + (R - 1) * rho, giving S^k * bf(n, t, k).
HardenedSecurity hardenedBruteForceSecurity(std::uint64_t n, std::uint64_t t, std::uint64_t k,
                                            double R, double rho);
HardenedSecurity hardenedBruteForceSecurity(std::uint64_t n, std::uint64_t t, std::uint64_t k,
                                            double R, const BinaryCodeSpec& code);

struct DecouplingReport {
    // Per vault entry: number of (pool descriptor, decode success) hits.
    std::vector<std::size_t> candidateCounts;
    double meanCandidates = 0.0;
    // Expected candidates when the pool holds the true descriptor plus
    // poolSize - 1 unrelated ones: 1 + (poolSize - 1) * rho.
    double analyticCandidates = 0.0;
    double rho = 0.0;
    // Probability that at least one of the n entries unmasks under an
    // R-candidate-per-entry guessing attack: 1 - (1 - S')^n, S' = (R-1)*rho.
    double attackSuccessProbability = 0.0;
};

// Runs every pool descriptor against every entry and reports how well the
// ordinates stay coupled to their descriptors.
DecouplingReport decoupleOrdinates(const DescriptorVault& vault,
                                   const std::vector<Descriptor>& pool, double R = 4.27);

// Uniform random descriptor of the given bit length.
Descriptor randomDescriptor(std::size_t length, Rng& rng);

// Independently flips each bit with probability flipRate.
Descriptor perturbDescriptor(const Descriptor& d, double flipRate, Rng& rng);

// Returns the BCH code instance matching a serialized spec (cached).
const BchCode& bchForSpec(const BinaryCodeSpec& spec);

// Descriptor text format: one hex-encoded vector per line (big-endian
// nibbles, bit i of the vector = bit i of the encoded integer), aligned with
// the owning template's minutiae order.
std::vector<Descriptor> readDescriptors(const std::string& path, std::size_t expectedLength);
void writeDescriptors(const std::string& path, const std::vector<Descriptor>& descriptors);

// Versioned big-endian binary format; round trips are byte-identical.
std::vector<std::uint8_t> serializeDescriptorVault(const DescriptorVault& vault);
DescriptorVault deserializeDescriptorVault(const std::vector<std::uint8_t>& blob);

} // namespace fpvault

#include "fpvault/classic_vault.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fpvault/errors.hpp"
#include "fpvault/rng.hpp"
#include "wire.hpp"

namespace fpvault {

namespace {

void validateParams(const ClassicVaultParams& p)
{
    if (p.k < 1 || p.tMin < p.k || p.tMax < p.tMin || p.n < p.tMax)
        throw std::domain_error("ClassicVaultParams: need 1 <= k <= tMin <= tMax <= n");
    if (p.n > 65536)
        throw std::domain_error("ClassicVaultParams: n exceeds the field order");
    if (p.separationThreshold <= 0.0 || p.matchThreshold <= 0.0)
        throw std::domain_error("ClassicVaultParams: thresholds must be positive");
}

double quantize(double v)
{
    return std::round(v * 100.0) / 100.0;
}

Minutia quantizeMinutiaRecord(const Minutia& m)
{
    Minutia out;
    out.a = quantize(m.a);
    out.b = quantize(m.b);
    out.theta = quantize(m.theta);
    if (out.theta >= 360.0)
        out.theta = 0.0;
    out.quality = 0.0; // published vaults carry no quality information
    return out;
}

bool lexicographicLess(const Minutia& x, const Minutia& y)
{
    if (x.a != y.a)
        return x.a < y.a;
    if (x.b != y.b)
        return x.b < y.b;
    return x.theta < y.theta;
}

// Uniform field element != excluded.
FieldElement drawOrdinateAvoiding(Rng& rng, FieldElement excluded)
{
    std::uint32_t r = rng.below(65535);
    if (r >= excluded.value)
        ++r;
    return {static_cast<std::uint16_t>(r)};
}

} // namespace

ClassicEnrollment enrollClassic(const MinutiaeTemplate& tmpl, const ClassicVaultParams& params,
                                const Polynomial& secret, std::uint64_t seed)
{
    validateParams(params);
    if (secret.degreeBound() != params.k)
        throw std::domain_error("enrollClassic: secret degree bound must equal params.k");

    std::vector<std::size_t> sel =
        selectWellSeparatedIndices(tmpl, params.tMin, params.tMax, params.separationThreshold);

    struct Slot {
        Minutia minutia;
        bool genuine;
        std::size_t templateIndex; // meaningful iff genuine
    };
    std::vector<Slot> slots;
    slots.reserve(params.n);
    for (std::size_t idx : sel)
        slots.push_back({quantizeMinutiaRecord(tmpl.minutiae[idx]), true, idx});

    Rng rng(seed);
    std::size_t chaffNeeded = params.n - slots.size();
    std::size_t budget = 1000 + 500 * chaffNeeded;
    std::size_t placed = 0;
    while (placed < chaffNeeded) {
        if (budget-- == 0)
            throw ChaffPlacementFailure("enrollClassic: could not place " +
                                        std::to_string(chaffNeeded) + " chaff minutiae");
        Minutia m;
        m.a = rng.unitReal() * tmpl.width;
        m.b = rng.unitReal() * tmpl.height;
        m.theta = rng.unitReal() * 360.0;
        m.quality = 0.0;
        m = quantizeMinutiaRecord(m);
        bool separated = true;
        for (const Slot& s : slots) {
            if (minutiaeDissimilarity(m, s.minutia) <= params.separationThreshold) {
                separated = false;
                break;
            }
        }
        if (!separated)
            continue;
        slots.push_back({m, false, 0});
        ++placed;
    }

    std::sort(slots.begin(), slots.end(),
              [](const Slot& x, const Slot& y) { return lexicographicLess(x.minutia, y.minutia); });

    ClassicEnrollment out;
    out.vault.params = params;
    out.vault.width = tmpl.width;
    out.vault.height = tmpl.height;
    out.vault.digest = polyHash(secret);
    out.vault.vaultMinutiae.reserve(params.n);
    out.vault.points.reserve(params.n);
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const Slot& s = slots[i];
        FieldElement x{static_cast<std::uint16_t>(i)};
        FieldElement fx = secret.evaluate(x);
        FieldElement y = s.genuine ? fx : drawOrdinateAvoiding(rng, fx);
        out.vault.vaultMinutiae.push_back(s.minutia);
        out.vault.points.push_back({x, y});
        if (s.genuine) {
            out.genuineVaultIndices.push_back(i);
            out.genuineTemplateIndices.push_back(s.templateIndex);
        }
    }
    return out;
}

UnlockingSet buildUnlockingSet(const ClassicVault& vault, const MinutiaeTemplate& query,
                               const std::vector<std::size_t>* genuineVaultIndices)
{
    std::vector<std::size_t> qsel = selectWellSeparatedIndices(
        query, 0, vault.params.tMax, vault.params.separationThreshold);

    UnlockingSet out;
    std::vector<bool> claimed(vault.vaultMinutiae.size(), false);
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
        if (best <= vault.params.matchThreshold) {
            claimed[bestIdx] = true;
            out.entries.push_back({bestIdx, qi, vault.points[bestIdx]});
        }
    }
    if (genuineVaultIndices) {
        std::size_t count = 0;
        for (const UnlockingEntry& e : out.entries)
            if (std::binary_search(genuineVaultIndices->begin(), genuineVaultIndices->end(),
                                   e.vaultIndex))
                ++count;
        out.genuineCount = count;
    }
    return out;
}

DecodeOutcome unlockClassic(const ClassicVault& vault, const MinutiaeTemplate& query,
                            std::optional<std::uint64_t> budget)
{
    UnlockingSet u = buildUnlockingSet(vault, query);
    return decodeExhaustive(u.points(), vault.params.k, vault.digest, budget);
}

std::vector<std::uint8_t> serializeClassicVault(const ClassicVault& vault)
{
    if (vault.vaultMinutiae.size() != vault.params.n || vault.points.size() != vault.params.n)
        throw std::domain_error("serializeClassicVault: inconsistent vault sizes");
    std::vector<std::uint8_t> out;
    out.reserve(16 + vault.vaultMinutiae.size() * 14 + 20);
    wire::putMagic(out, wire::kSchemeClassic);
    wire::putU32(out, vault.params.n);
    wire::putU32(out, vault.params.tMin);
    wire::putU32(out, vault.params.tMax);
    wire::putU32(out, vault.params.k);
    wire::putF64(out, vault.params.separationThreshold);
    wire::putF64(out, vault.params.matchThreshold);
    wire::putU32(out, vault.width);
    wire::putU32(out, vault.height);
    for (const Minutia& m : vault.vaultMinutiae) {
        wire::putU32(out, static_cast<std::uint32_t>(std::llround(m.a * 100.0)));
        wire::putU32(out, static_cast<std::uint32_t>(std::llround(m.b * 100.0)));
        wire::putU16(out, static_cast<std::uint16_t>(std::llround(m.theta * 100.0)));
    }
    for (const VaultPoint& p : vault.points) {
        wire::putU16(out, p.x.value);
        wire::putU16(out, p.y.value);
    }
    out.insert(out.end(), vault.digest.bytes.begin(), vault.digest.bytes.end());
    return out;
}

ClassicVault deserializeClassicVault(const std::vector<std::uint8_t>& blob)
{
    wire::Reader r(blob, "classic vault");
    wire::checkMagic(r, wire::kSchemeClassic, "classic vault");
    ClassicVault vault;
    vault.params.n = r.u32();
    vault.params.tMin = r.u32();
    vault.params.tMax = r.u32();
    vault.params.k = r.u32();
    vault.params.separationThreshold = r.f64();
    vault.params.matchThreshold = r.f64();
    vault.width = r.u32();
    vault.height = r.u32();
    validateParams(vault.params);
    vault.vaultMinutiae.resize(vault.params.n);
    for (Minutia& m : vault.vaultMinutiae) {
        m.a = r.u32() / 100.0;
        m.b = r.u32() / 100.0;
        m.theta = r.u16() / 100.0;
        m.quality = 0.0;
        if (m.theta >= 360.0)
            throw ParseError("classic vault: direction out of range");
    }
    vault.points.resize(vault.params.n);
    for (VaultPoint& p : vault.points) {
        p.x.value = r.u16();
        p.y.value = r.u16();
    }
    r.bytes(vault.digest.bytes.data(), vault.digest.bytes.size());
    r.expectEnd();
    return vault;
}

} // namespace fpvault

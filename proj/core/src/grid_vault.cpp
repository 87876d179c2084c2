#include "fpvault/grid_vault.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpvault/combinatorics.hpp"
#include "fpvault/errors.hpp"
#include "fpvault/rng.hpp"
#include "wire.hpp"

namespace fpvault {

namespace {

void validateParams(const GridParams& p)
{
    if (!(p.lambda > 0.0))
        throw std::domain_error("GridParams: lambda must be positive");
    if (p.s == 0)
        throw std::domain_error("GridParams: need at least one direction level");
    if (p.k < 1 || p.tMax < p.k)
        throw std::domain_error("GridParams: need 1 <= k <= tMax");
}

FieldElement drawOrdinateAvoiding(Rng& rng, FieldElement excluded)
{
    std::uint32_t r = rng.below(65535);
    if (r >= excluded.value)
        ++r;
    return {static_cast<std::uint16_t>(r)};
}

std::vector<VaultPoint> unlockingPoints(const GridVault& vault, const FeatureSet& features)
{
    std::vector<VaultPoint> points;
    points.reserve(features.labels.size());
    for (std::uint32_t e : features.labels)
        points.push_back(
            {FieldElement{static_cast<std::uint16_t>(e)}, vault.ordinates[e]});
    return points;
}

} // namespace

FeatureSet extractFeatureSet(const MinutiaeTemplate& tmpl, const HexGrid& grid, std::uint32_t s,
                             std::uint32_t tMax)
{
    FeatureSet out;
    for (const Minutia& m : tmpl.minutiae) {
        if (out.labels.size() >= tMax)
            break;
        std::uint32_t label = quantizeMinutia(grid, s, m);
        if (std::find(out.labels.begin(), out.labels.end(), label) == out.labels.end())
            out.labels.push_back(label);
    }
    std::sort(out.labels.begin(), out.labels.end());
    return out;
}

GridEnrollment gridEnroll(const MinutiaeTemplate& tmpl, const GridParams& params,
                          const Polynomial& secret, std::uint64_t seed)
{
    validateParams(params);
    if (secret.degreeBound() != params.k)
        throw std::domain_error("gridEnroll: secret degree bound must equal params.k");
    HexGrid grid = buildHexGrid(params.lambda, params.width, params.height);
    const std::uint64_t n = static_cast<std::uint64_t>(grid.size()) * params.s;
    if (n > 65536)
        throw std::domain_error("gridEnroll: feature universe exceeds the field order");

    FeatureSet features = extractFeatureSet(tmpl, grid, params.s, params.tMax);
    if (features.size() < params.k)
        throw FailureToCapture("gridEnroll: only " + std::to_string(features.size()) +
                               " features, need at least " + std::to_string(params.k));

    GridEnrollment out;
    out.features = features;
    out.vault.params = params;
    out.vault.digest = polyHash(secret);
    out.vault.ordinates.resize(n);
    Rng rng(seed);
    for (std::uint64_t e = 0; e < n; ++e) {
        FieldElement x{static_cast<std::uint16_t>(e)};
        FieldElement fx = secret.evaluate(x);
        bool genuine = std::binary_search(features.labels.begin(), features.labels.end(),
                                          static_cast<std::uint32_t>(e));
        out.vault.ordinates[e] = genuine ? fx : drawOrdinateAvoiding(rng, fx);
    }
    return out;
}

DecodeOutcome gridUnlock(const GridVault& vault, const MinutiaeTemplate& query,
                         std::uint64_t draws, std::uint64_t seed)
{
    validateParams(vault.params);
    HexGrid grid = buildHexGrid(vault.params.lambda, vault.params.width, vault.params.height);
    FeatureSet features = extractFeatureSet(query, grid, vault.params.s, vault.params.tMax);
    return randomizedDecode(unlockingPoints(vault, features), vault.params.k, vault.digest,
                            draws, seed);
}

DecodeOutcome gridUnlockExhaustive(const GridVault& vault, const MinutiaeTemplate& query,
                                   std::optional<std::uint64_t> budget)
{
    validateParams(vault.params);
    HexGrid grid = buildHexGrid(vault.params.lambda, vault.params.width, vault.params.height);
    FeatureSet features = extractFeatureSet(query, grid, vault.params.s, vault.params.tMax);
    return decodeExhaustive(unlockingPoints(vault, features), vault.params.k, vault.digest,
                            budget);
}

double decodeSuccessProbability(std::uint32_t t, std::uint32_t omega, std::uint32_t k,
                                std::uint64_t draws)
{
    if (k < 1 || omega > t)
        throw std::domain_error("decodeSuccessProbability: need 1 <= k and omega <= t");
    if (omega < k || draws == 0)
        return 0.0;
    BigInt num = binomial(omega, k);
    BigInt den = binomial(t, k);
    if (num == den)
        return 1.0;
    double perDraw = std::exp2(log2Rational(num, den));
    return -std::expm1(static_cast<double>(draws) * std::log1p(-perDraw));
}

std::vector<Minutia> gridFeatureMinutiae(const GridParams& params)
{
    validateParams(params);
    HexGrid grid = buildHexGrid(params.lambda, params.width, params.height);
    const std::size_t n = grid.size() * params.s;
    std::vector<Minutia> out;
    out.reserve(n);
    for (std::size_t label = 0; label < n; ++label)
        out.push_back(featureMinutia(grid, params.s, static_cast<std::uint32_t>(label)));
    return out;
}

namespace {

// Nearest grid indices of a template's minutiae in quality order; direction
// buckets are recomputed per direction-level count.
struct QuantizedSequence {
    std::vector<std::size_t> nearest;
    std::vector<double> theta;
};

QuantizedSequence quantizeSequence(const MinutiaeTemplate& tmpl, const HexGrid& grid)
{
    QuantizedSequence q;
    q.nearest.reserve(tmpl.minutiae.size());
    q.theta.reserve(tmpl.minutiae.size());
    for (const Minutia& m : tmpl.minutiae) {
        q.nearest.push_back(nearestGridIndex(grid, m.a, m.b));
        q.theta.push_back(m.theta);
    }
    return q;
}

std::vector<std::uint32_t> distinctLabels(const QuantizedSequence& q, std::uint32_t s,
                                          std::uint32_t r, std::uint32_t tMax)
{
    std::vector<std::uint32_t> labels;
    for (std::size_t i = 0; i < q.nearest.size() && labels.size() < tMax; ++i) {
        std::uint32_t j = static_cast<std::uint32_t>(q.theta[i] * s / 360.0);
        if (j >= s)
            j = s - 1;
        std::uint32_t label = static_cast<std::uint32_t>(q.nearest[i]) + r * j;
        if (std::find(labels.begin(), labels.end(), label) == labels.end())
            labels.push_back(label);
    }
    std::sort(labels.begin(), labels.end());
    return labels;
}

std::size_t intersectionSize(const std::vector<std::uint32_t>& a,
                             const std::vector<std::uint32_t>& b)
{
    std::size_t i = 0, j = 0, count = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            ++i;
        else if (b[j] < a[i])
            ++j;
        else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

bool betterConfig(const GridScoreRow& x, const GridScoreRow& y)
{
    if (x.gar != y.gar)
        return x.gar > y.gar;
    if (x.far != y.far)
        return x.far < y.far;
    // highest GAR, lowest FAR, then the strongest decoder setting: the
    // largest ratio k/tMax. Remaining ties resolve deterministically.
    const double xRatio = double(x.params.k) / double(x.params.tMax);
    const double yRatio = double(y.params.k) / double(y.params.tMax);
    if (xRatio != yRatio)
        return xRatio > yRatio;
    if (x.params.k != y.params.k)
        return x.params.k > y.params.k;
    if (x.params.lambda != y.params.lambda)
        return x.params.lambda < y.params.lambda;
    return x.params.s < y.params.s;
}

} // namespace

GridTrainingResult trainParameters(const std::vector<GridTrainingSample>& fingers,
                                   const GridSearchSpace& space)
{
    if (space.lambdas.empty() || space.directionLevels.empty() || space.tMaxValues.empty() ||
        space.kValues.empty())
        throw std::domain_error("trainParameters: empty search space");
    for (const GridTrainingSample& f : fingers)
        if (f.transforms.size() != f.impressions.size())
            throw std::domain_error("trainParameters: impressions and transforms must be parallel");

    GridTrainingResult result;
    for (double lambda : space.lambdas) {
        HexGrid grid = buildHexGrid(lambda, space.width, space.height);
        const std::uint32_t r = static_cast<std::uint32_t>(grid.size());

        // Quantize enrollment impressions once, and every aligned genuine
        // query per pair (ground-truth motion: query j into i's frame).
        std::vector<std::vector<QuantizedSequence>> raw(fingers.size());
        struct GenuinePair {
            std::size_t finger, i;
            QuantizedSequence aligned;
        };
        std::vector<GenuinePair> genuinePairs;
        for (std::size_t f = 0; f < fingers.size(); ++f) {
            const GridTrainingSample& sample = fingers[f];
            raw[f].reserve(sample.impressions.size());
            for (const MinutiaeTemplate& tmpl : sample.impressions)
                raw[f].push_back(quantizeSequence(tmpl, grid));
            for (std::size_t i = 0; i < sample.impressions.size(); ++i) {
                for (std::size_t j = i + 1; j < sample.impressions.size(); ++j) {
                    RigidTransform toEnrollFrame = composeTransforms(
                        sample.transforms[i], invertTransform(sample.transforms[j]));
                    MinutiaeTemplate aligned =
                        applyTransform(sample.impressions[j], toEnrollFrame);
                    genuinePairs.push_back({f, i, quantizeSequence(aligned, grid)});
                }
            }
        }

        for (std::uint32_t s : space.directionLevels) {
            if (static_cast<std::uint64_t>(r) * s > 65536)
                continue; // feature universe would not fit the field
            for (std::uint32_t tMax : space.tMaxValues) {
                // Feature overlaps are k-independent; compute them once.
                std::vector<std::size_t> genuineOmega;
                genuineOmega.reserve(genuinePairs.size());
                for (const GenuinePair& pair : genuinePairs) {
                    std::vector<std::uint32_t> a =
                        distinctLabels(raw[pair.finger][pair.i], s, r, tMax);
                    std::vector<std::uint32_t> b = distinctLabels(pair.aligned, s, r, tMax);
                    genuineOmega.push_back(intersectionSize(a, b));
                }
                std::vector<std::size_t> impostorOmega;
                for (std::size_t fa = 0; fa < fingers.size(); ++fa) {
                    if (fingers[fa].impressions.empty())
                        continue;
                    for (std::size_t fb = fa + 1; fb < fingers.size(); ++fb) {
                        if (fingers[fb].impressions.empty())
                            continue;
                        std::vector<std::uint32_t> a = distinctLabels(raw[fa][0], s, r, tMax);
                        std::vector<std::uint32_t> b = distinctLabels(raw[fb][0], s, r, tMax);
                        impostorOmega.push_back(intersectionSize(a, b));
                    }
                }

                for (std::uint32_t k : space.kValues) {
                    if (k < 1 || k > tMax)
                        continue;
                    GridScoreRow row;
                    row.params = {lambda, s, space.width, space.height, tMax, k};
                    row.n = r * s;
                    row.genuinePairs = genuineOmega.size();
                    row.impostorPairs = impostorOmega.size();
                    std::uint64_t g = 0;
                    for (std::size_t omega : genuineOmega)
                        if (omega >= k)
                            ++g;
                    std::uint64_t f = 0;
                    for (std::size_t omega : impostorOmega)
                        if (omega >= k)
                            ++f;
                    row.gar = genuineOmega.empty()
                                  ? 0.0
                                  : static_cast<double>(g) / genuineOmega.size();
                    row.far = impostorOmega.empty()
                                  ? 0.0
                                  : static_cast<double>(f) / impostorOmega.size();
                    result.table.push_back(row);
                }
            }
        }
    }
    if (result.table.empty())
        throw std::domain_error("trainParameters: no admissible configuration in the space");
    const GridScoreRow* best = &result.table.front();
    for (const GridScoreRow& row : result.table)
        if (betterConfig(row, *best))
            best = &row;
    result.best = best->params;
    return result;
}

std::vector<std::uint8_t> serializeGridVault(const GridVault& vault)
{
    std::vector<std::uint8_t> out;
    out.reserve(48 + vault.ordinates.size() * 2 + 20);
    wire::putMagic(out, wire::kSchemeGrid);
    wire::putF64(out, vault.params.lambda);
    wire::putU32(out, vault.params.s);
    wire::putU32(out, vault.params.width);
    wire::putU32(out, vault.params.height);
    wire::putU32(out, vault.params.tMax);
    wire::putU32(out, vault.params.k);
    wire::putU32(out, static_cast<std::uint32_t>(vault.ordinates.size()));
    for (FieldElement y : vault.ordinates)
        wire::putU16(out, y.value);
    out.insert(out.end(), vault.digest.bytes.begin(), vault.digest.bytes.end());
    return out;
}

GridVault deserializeGridVault(const std::vector<std::uint8_t>& blob)
{
    wire::Reader r(blob, "grid vault");
    wire::checkMagic(r, wire::kSchemeGrid, "grid vault");
    GridVault vault;
    vault.params.lambda = r.f64();
    vault.params.s = r.u32();
    vault.params.width = r.u32();
    vault.params.height = r.u32();
    vault.params.tMax = r.u32();
    vault.params.k = r.u32();
    std::uint32_t count = r.u32();
    validateParams(vault.params);
    HexGrid grid = buildHexGrid(vault.params.lambda, vault.params.width, vault.params.height);
    if (static_cast<std::uint64_t>(grid.size()) * vault.params.s != count)
        throw ParseError("grid vault: ordinate count does not match the grid geometry");
    vault.ordinates.resize(count);
    for (FieldElement& y : vault.ordinates)
        y.value = r.u16();
    r.bytes(vault.digest.bytes.data(), vault.digest.bytes.size());
    r.expectEnd();
    return vault;
}

} // namespace fpvault

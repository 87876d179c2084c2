#include "fpvault/attacks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "fpvault/rng.hpp"
#include "fpvault/stats.hpp"

namespace fpvault {

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// One brute-force iteration: draw the subset for index `i`, interpolate,
// compare digests.
bool bruteForceIteration(const std::vector<VaultPoint>& points, std::size_t k,
                         const SecretDigest& digest, std::uint64_t seed, std::uint64_t i,
                         std::vector<std::size_t>& scratch, std::vector<VaultPoint>& subset,
                         Polynomial& candidate)
{
    Rng rng = Rng::fork(seed, i);
    const std::size_t n = points.size();
    std::iota(scratch.begin(), scratch.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t pick = j + rng.below(static_cast<std::uint32_t>(n - j));
        std::swap(scratch[j], scratch[pick]);
        subset[j] = points[scratch[j]];
    }
    candidate = lagrangeInterpolate(subset, k);
    return polyHash(candidate) == digest;
}

} // namespace

AttackReport bruteForceAttack(const std::vector<VaultPoint>& points, std::size_t k,
                              const SecretDigest& digest, std::uint64_t seed,
                              std::uint64_t maxIterations, std::uint32_t workers)
{
    if (k == 0 || points.size() < k)
        throw std::domain_error("bruteForceAttack: need k >= 1 and at least k points");
    if (workers == 0)
        workers = 1;

    AttackReport report;
    const std::uint64_t warmup = std::min<std::uint64_t>(1000, maxIterations / 10);
    Clock::time_point start = Clock::now();

    if (workers == 1) {
        std::vector<std::size_t> scratch(points.size());
        std::vector<VaultPoint> subset(k);
        Polynomial candidate;
        Clock::time_point windowStart = start;
        std::uint64_t windowBase = 0;
        for (std::uint64_t i = 0; i < maxIterations; ++i) {
            if (i == warmup) {
                windowStart = Clock::now();
                windowBase = i;
            }
            bool hit = bruteForceIteration(points, k, digest, seed, i, scratch, subset,
                                           candidate);
            ++report.iterations;
            if (hit) {
                report.success = true;
                report.recoveredSecret = candidate;
                break;
            }
        }
        report.wallSeconds = secondsSince(start);
        double windowSeconds = secondsSince(windowStart);
        std::uint64_t windowIterations = report.iterations - windowBase;
        report.perCoreRate = windowIterations > 0 && windowSeconds > 0.0
                                 ? windowIterations / windowSeconds
                                 : (report.wallSeconds > 0.0
                                        ? report.iterations / report.wallSeconds
                                        : 0.0);
        report.metadata["workers"] = "1";
        report.metadata["warmupIterations"] = std::to_string(std::min(warmup, report.iterations));
        return report;
    }

    // Striped multi-worker search. Every worker walks its own arithmetic
    // progression of draw indices in ascending order and publishes the lowest
    // successful index; the final result is therefore identical to the
    // sequential one regardless of scheduling.
    std::atomic<std::uint64_t> bestIndex{std::numeric_limits<std::uint64_t>::max()};
    std::atomic<std::uint64_t> evaluated{0};
    std::vector<Polynomial> workerSecrets(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w]() {
            std::vector<std::size_t> scratch(points.size());
            std::vector<VaultPoint> subset(k);
            Polynomial candidate;
            std::uint64_t local = 0;
            for (std::uint64_t i = w; i < maxIterations; i += workers) {
                if ((local & 0xFF) == 0 && bestIndex.load(std::memory_order_relaxed) < i)
                    break;
                ++local;
                if (bruteForceIteration(points, k, digest, seed, i, scratch, subset,
                                        candidate)) {
                    std::uint64_t current = bestIndex.load();
                    while (i < current && !bestIndex.compare_exchange_weak(current, i)) {
                    }
                    if (bestIndex.load() == i)
                        workerSecrets[w] = candidate;
                    break;
                }
            }
            evaluated.fetch_add(local);
        });
    }
    for (std::thread& t : threads)
        t.join();

    report.wallSeconds = secondsSince(start);
    std::uint64_t winner = bestIndex.load();
    if (winner != std::numeric_limits<std::uint64_t>::max()) {
        report.success = true;
        report.iterations = winner + 1;
        report.recoveredSecret = workerSecrets[winner % workers];
    } else {
        report.iterations = maxIterations;
    }
    double rate = report.wallSeconds > 0.0 ? evaluated.load() / report.wallSeconds : 0.0;
    report.perCoreRate = rate / workers;
    report.metadata["workers"] = std::to_string(workers);
    report.metadata["evaluations"] = std::to_string(evaluated.load());
    return report;
}

AttackReport falseAcceptAttack(
    const std::function<DecodeOutcome(const MinutiaeTemplate&)>& authenticate,
    const std::vector<MinutiaeTemplate>& queries)
{
    AttackReport report;
    Clock::time_point start = Clock::now();
    std::uint64_t subsetsTotal = 0;
    for (const MinutiaeTemplate& query : queries) {
        DecodeOutcome outcome = authenticate(query);
        ++report.iterations;
        subsetsTotal += outcome.subsetsTried;
        if (outcome.success()) {
            report.success = true;
            report.recoveredSecret = outcome.secret;
            break;
        }
    }
    report.wallSeconds = secondsSince(start);
    report.perCoreRate =
        report.wallSeconds > 0.0 ? report.iterations / report.wallSeconds : 0.0;
    report.metadata["subsetsTried"] = std::to_string(subsetsTotal);
    if (report.iterations > 0)
        report.metadata["meanSecondsPerAttempt"] =
            std::to_string(report.wallSeconds / report.iterations);
    return report;
}

double faCost(double far, double secondsPerAttempt, std::uint32_t workers)
{
    if (!(far > 0.0) || far > 1.0)
        throw std::domain_error("faCost: far must be in (0, 1]");
    if (!(secondsPerAttempt > 0.0))
        throw std::domain_error("faCost: secondsPerAttempt must be positive");
    if (workers == 0)
        throw std::domain_error("faCost: need at least one worker");
    return medianTrials(far) * secondsPerAttempt / workers;
}

namespace {

struct VoteKey {
    std::int64_t packed;
};

// Rotation grid index + translation bin, packed for the accumulator.
std::int64_t packKey(std::uint32_t rotIdx, std::int64_t bx, std::int64_t by)
{
    return (static_cast<std::int64_t>(rotIdx) << 42) | ((bx + (1 << 20)) << 21) |
           (by + (1 << 20));
}

struct PairCandidate {
    double d;
    std::size_t i, j;
};

// Greedy one-to-one pairing under the dissimilarity gate; returns matched
// (indexA, indexB) pairs, closest first.
std::vector<std::pair<std::size_t, std::size_t>> greedyPairs(
    const std::vector<Minutia>& a, const std::vector<Minutia>& b, double threshold)
{
    std::vector<PairCandidate> candidates;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            double d = minutiaeDissimilarity(a[i], b[j]);
            if (d <= threshold)
                candidates.push_back({d, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const PairCandidate& x, const PairCandidate& y) {
                  if (x.d != y.d)
                      return x.d < y.d;
                  if (x.i != y.i)
                      return x.i < y.i;
                  return x.j < y.j;
              });
    std::vector<bool> usedA(a.size(), false), usedB(b.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const PairCandidate& c : candidates) {
        if (usedA[c.i] || usedB[c.j])
            continue;
        usedA[c.i] = true;
        usedB[c.j] = true;
        pairs.emplace_back(c.i, c.j);
    }
    return pairs;
}

// Strict lexicographic order on minutiae lists, used to run the alignment
// search in one canonical direction regardless of argument order.
bool minutiaeListLess(const std::vector<Minutia>& x, const std::vector<Minutia>& y)
{
    auto asTuple = [](const Minutia& m) { return std::tie(m.a, m.b, m.theta, m.quality); };
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                        [&](const Minutia& p, const Minutia& q) {
                                            return asTuple(p) < asTuple(q);
                                        });
}

// Rigid least-squares fit (positions only) sending each paired B minutia
// onto its A partner; the returned motion is centered at the origin.
// Needs at least two pairs for the rotation to be determined.
RigidTransform fitRigidPairs(const std::vector<Minutia>& a, const std::vector<Minutia>& b,
                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs)
{
    double muAx = 0.0, muAy = 0.0, muBx = 0.0, muBy = 0.0;
    for (const auto& [i, j] : pairs) {
        muAx += a[i].a;
        muAy += a[i].b;
        muBx += b[j].a;
        muBy += b[j].b;
    }
    const double n = static_cast<double>(pairs.size());
    muAx /= n;
    muAy /= n;
    muBx /= n;
    muBy /= n;
    double dot = 0.0, cross = 0.0;
    for (const auto& [i, j] : pairs) {
        const double ax = a[i].a - muAx, ay = a[i].b - muAy;
        const double bx = b[j].a - muBx, by = b[j].b - muBy;
        dot += bx * ax + by * ay;
        cross += bx * ay - by * ax;
    }
    const double rad = std::atan2(cross, dot);
    const double c = std::cos(rad), s = std::sin(rad);
    RigidTransform t;
    t.rotationDeg = rad * (180.0 / 3.14159265358979323846);
    t.dx = muAx - (c * muBx - s * muBy);
    t.dy = muAy - (s * muBx + c * muBy);
    t.cx = 0.0;
    t.cy = 0.0;
    return t;
}

} // namespace

// The directed search; the public wrapper below fixes the direction so the
// score is exactly symmetric under argument swap.
static CorrelationResult correlationScoreDirected(const std::vector<Minutia>& minutiaeA,
                                                  const std::vector<Minutia>& minutiaeB,
                                                  std::uint32_t width, std::uint32_t height,
                                                  const CorrelationSearchParams& params)
{
    const double cx = width / 2.0;
    const double cy = height / 2.0;
    const double angleGate = params.pairThreshold / 0.2;

    // Enumerate the rotation grid.
    std::vector<double> rotations;
    for (std::uint32_t idx = 0;; ++idx) {
        double phi = -params.rotationRangeDeg + idx * params.rotationStepDeg;
        if (phi > params.rotationRangeDeg + 1e-9)
            break;
        rotations.push_back(phi);
    }

    // Vote translations induced by pairing each B minutia with each
    // angle-compatible A minutia under each rotation.
    std::unordered_map<std::int64_t, std::uint32_t> votes;
    std::vector<Minutia> rotated(minutiaeB.size());
    for (std::uint32_t rotIdx = 0; rotIdx < rotations.size(); ++rotIdx) {
        RigidTransform rot{0.0, 0.0, rotations[rotIdx], cx, cy};
        for (std::size_t j = 0; j < minutiaeB.size(); ++j)
            rotated[j] = applyTransform(minutiaeB[j], rot);
        for (const Minutia& a : minutiaeA) {
            for (const Minutia& rb : rotated) {
                if (angularDistance(a.theta, rb.theta) > angleGate)
                    continue;
                double tx = a.a - rb.a;
                double ty = a.b - rb.b;
                std::int64_t bx = std::llround(tx / params.voteBinWidth);
                std::int64_t by = std::llround(ty / params.voteBinWidth);
                ++votes[packKey(rotIdx, bx, by)];
            }
        }
    }

    // Refinement candidates: the identity motion always competes, followed by
    // the strongest translation bins (ties broken on the packed key so the
    // candidate list is deterministic).
    std::vector<std::pair<std::int64_t, std::uint32_t>> ranked(votes.begin(), votes.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second)
            return x.second > y.second;
        return x.first < y.first;
    });
    std::vector<RigidTransform> candidates;
    candidates.push_back(RigidTransform::identity());
    for (std::size_t r = 0; r < ranked.size() && r < params.refineCandidates; ++r) {
        std::int64_t key = ranked[r].first;
        std::int64_t by = (key & ((1 << 21) - 1)) - (1 << 20);
        std::int64_t bx = ((key >> 21) & ((1 << 21) - 1)) - (1 << 20);
        std::uint32_t rotIdx = static_cast<std::uint32_t>(key >> 42);
        RigidTransform t;
        t.rotationDeg = rotations[rotIdx];
        t.dx = bx * params.voteBinWidth;
        t.dy = by * params.voteBinWidth;
        t.cx = cx;
        t.cy = cy;
        candidates.push_back(t);
    }

    CorrelationResult best;
    best.score = -1.0;
    std::vector<Minutia> moved(minutiaeB.size());
    for (const RigidTransform& t : candidates) {
        for (std::size_t j = 0; j < minutiaeB.size(); ++j)
            moved[j] = applyTransform(minutiaeB[j], t);
        std::vector<std::pair<std::size_t, std::size_t>> pairs =
            greedyPairs(minutiaeA, moved, params.pairThreshold);
        if (static_cast<double>(pairs.size()) > best.score) {
            best.score = static_cast<double>(pairs.size());
            best.matchedPairs = std::move(pairs);
            best.bestTransform = t;
        }
    }
    return best;
}

CorrelationResult correlationScore(const std::vector<Minutia>& minutiaeA,
                                   const std::vector<Minutia>& minutiaeB, std::uint32_t width,
                                   std::uint32_t height, const CorrelationSearchParams& params)
{
    if (minutiaeListLess(minutiaeB, minutiaeA)) {
        CorrelationResult r = correlationScoreDirected(minutiaeB, minutiaeA, width, height,
                                                       params);
        for (auto& p : r.matchedPairs)
            std::swap(p.first, p.second);
        r.bestTransform = invertTransform(r.bestTransform);
        return r;
    }
    return correlationScoreDirected(minutiaeA, minutiaeB, width, height, params);
}

AttackReport correlationAttack(const ClassicVault& vaultA, const ClassicVault& vaultB,
                               std::optional<std::uint64_t> budget,
                               const CorrelationSearchParams& params)
{
    AttackReport report;
    Clock::time_point start = Clock::now();
    CorrelationResult corr = correlationScore(vaultA.vaultMinutiae, vaultB.vaultMinutiae,
                                              vaultA.width, vaultA.height, params);

    // Polish the coarse motion by alternating a rigid least-squares fit on
    // the closest pairs with re-pairing. Agreements between the vaults
    // collapse to near-zero dissimilarity under the polished motion, so
    // ranking pairs closest first concentrates them at the front of the
    // candidate list. A pairing is judged by what the decoder will consume:
    // the total dissimilarity of its tMax closest pairs, charging the full
    // gate for any missing slot.
    const std::vector<Minutia>& ma = vaultA.vaultMinutiae;
    const std::vector<Minutia>& mb = vaultB.vaultMinutiae;
    const std::size_t tMax = vaultA.params.tMax;
    std::vector<std::pair<std::size_t, std::size_t>> bestPairs = corr.matchedPairs;
    if (bestPairs.size() >= 2) {
        std::vector<Minutia> moved(mb.size());
        auto quality = [&](const std::vector<std::pair<std::size_t, std::size_t>>& ps) {
            double sum = 0.0;
            const std::size_t front = std::min(ps.size(), tMax);
            for (std::size_t r = 0; r < front; ++r)
                sum += minutiaeDissimilarity(ma[ps[r].first], moved[ps[r].second]);
            sum += static_cast<double>(tMax - front) * params.pairThreshold;
            return sum;
        };
        for (std::size_t j = 0; j < mb.size(); ++j)
            moved[j] = applyTransform(mb[j], corr.bestTransform);
        double bestQuality = quality(bestPairs);
        std::vector<std::pair<std::size_t, std::size_t>> pairs = bestPairs;
        for (int pass = 0; pass < 6; ++pass) {
            // Fit on the closest pairs only; chance agreements are diluted
            // there, so the fit snaps towards the coherent motion.
            std::vector<std::pair<std::size_t, std::size_t>> fitSet = pairs;
            if (fitSet.size() > 2 * tMax)
                fitSet.resize(2 * tMax);
            RigidTransform motion = fitRigidPairs(ma, mb, fitSet);
            for (std::size_t j = 0; j < mb.size(); ++j)
                moved[j] = applyTransform(mb[j], motion);
            pairs = greedyPairs(ma, moved, params.pairThreshold);
            if (pairs.size() < 2)
                break;
            const double q = quality(pairs);
            if (q < bestQuality - 1e-9) {
                bestPairs = pairs;
                bestQuality = q;
            } else {
                break;
            }
        }
    }

    std::vector<VaultPoint> candidates;
    candidates.reserve(bestPairs.size());
    for (const auto& [ia, ib] : bestPairs)
        candidates.push_back(vaultA.points[ia]);
    // The vault hides at most tMax genuine points and the pairing arrives
    // closest first, so anything past tMax is necessarily a chance chaff
    // agreement; keeping it would only dilute the unlocking set.
    if (candidates.size() > vaultA.params.tMax)
        candidates.resize(vaultA.params.tMax);
    DecodeOutcome outcome =
        decodeExhaustive(candidates, vaultA.params.k, vaultA.digest, budget);
    report.wallSeconds = secondsSince(start);
    report.success = outcome.success();
    report.iterations = outcome.subsetsTried;
    report.recoveredSecret = outcome.secret;
    report.perCoreRate =
        report.wallSeconds > 0.0 ? report.iterations / report.wallSeconds : 0.0;
    report.metadata["correlationScore"] = std::to_string(corr.score);
    report.metadata["refinedPairs"] = std::to_string(bestPairs.size());
    report.metadata["candidatePoints"] = std::to_string(candidates.size());
    return report;
}

AttackReport correlationAttack(const GridVault& vaultA, const GridVault& vaultB,
                               std::optional<std::uint64_t> budget,
                               const CorrelationSearchParams& params)
{
    (void)params;
    AttackReport report;
    Clock::time_point start = Clock::now();
    // Both vaults publish the full feature universe, so the correlation
    // carries no information: every point of A is a candidate.
    std::vector<VaultPoint> candidates;
    candidates.reserve(vaultA.ordinates.size());
    for (std::size_t e = 0; e < vaultA.ordinates.size(); ++e)
        candidates.push_back(
            {FieldElement{static_cast<std::uint16_t>(e)}, vaultA.ordinates[e]});
    DecodeOutcome outcome =
        decodeExhaustive(candidates, vaultA.params.k, vaultA.digest, budget);
    report.wallSeconds = secondsSince(start);
    report.success = outcome.success();
    report.iterations = outcome.subsetsTried;
    report.recoveredSecret = outcome.secret;
    report.perCoreRate =
        report.wallSeconds > 0.0 ? report.iterations / report.wallSeconds : 0.0;
    report.metadata["correlationScore"] = std::to_string(vaultB.ordinates.size());
    report.metadata["candidatePoints"] = std::to_string(candidates.size());
    return report;
}

RandomizedDecoderCost faCostRandomizedDecoder(const std::vector<UnlockingStatsEntry>& entries,
                                              std::uint32_t k, std::uint64_t draws)
{
    if (entries.empty())
        throw std::domain_error("faCostRandomizedDecoder: no unlocking statistics");
    if (draws == 0)
        throw std::domain_error("faCostRandomizedDecoder: need at least one draw");
    RandomizedDecoderCost out;
    const double inf = std::numeric_limits<double>::infinity();

    // Per-query log survival probability of a single draw. All aggregation
    // happens in log space: a linear-space mean saturates at 1 once the
    // per-query failure odds drop below an ulp, which distorts the median
    // attempt count (and with it the cost curve) by whole percents.
    std::vector<double> survivalLogs;
    survivalLogs.reserve(entries.size());
    for (const UnlockingStatsEntry& e : entries)
        survivalLogs.push_back(std::log1p(-decodeSuccessProbability(e.t, e.omega, k, 1)));

    auto logMeanSurvival = [&](double d) {
        double maxLog = -inf;
        for (double logS : survivalLogs)
            maxLog = std::max(maxLog, d * logS);
        if (maxLog == -inf)
            return -inf; // every query succeeds with certainty
        double sumExp = 0.0;
        for (double logS : survivalLogs)
            sumExp += std::exp(d * logS - maxLog);
        return maxLog + std::log(sumExp / static_cast<double>(entries.size()));
    };
    auto medianFromLog = [inf](double logSurvive) {
        if (logSurvive == 0.0)
            return inf; // far == 0: the attack never succeeds
        if (logSurvive == -inf)
            return 1.0; // far == 1: the first query already wins
        return std::log(0.5) / logSurvive;
    };

    const double logSurviveAll = logMeanSurvival(static_cast<double>(draws));
    const double logSurviveOne = logMeanSurvival(1.0);
    out.far = -std::expm1(logSurviveAll);
    out.farSingleDraw = -std::expm1(logSurviveOne);
    out.medianAttempts = medianFromLog(logSurviveAll);
    out.costIterations = out.medianAttempts * static_cast<double>(draws);
    out.costIterationsSingleDraw = medianFromLog(logSurviveOne);
    return out;
}

} // namespace fpvault

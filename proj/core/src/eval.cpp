#include "fpvault/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <regex>
#include <stdexcept>
#include <thread>

#include "fpvault/errors.hpp"
#include "fpvault/rng.hpp"

namespace fpvault {

namespace {

namespace fs = std::filesystem;

// Seed-stream tags for Rng::fork: every random decision in a protocol run
// gets a stream id tag<<48 | finger<<32 | i<<16 | j, so results do not
// depend on evaluation order or worker count.
constexpr std::uint64_t kStreamSecret = 1;
constexpr std::uint64_t kStreamEnroll = 2;
constexpr std::uint64_t kStreamHarden = 3;
constexpr std::uint64_t kStreamGenuine = 4;
constexpr std::uint64_t kStreamImpostor = 5;

std::uint64_t streamId(std::uint64_t tag, std::uint64_t finger, std::uint64_t i,
                       std::uint64_t j = 0)
{
    return (tag << 48) | (finger << 32) | (i << 16) | j;
}

std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t stream)
{
    return Rng::fork(seed, stream).nextU64();
}

// Runs body(0..count-1) on `workers` threads. Work items are claimed from a
// shared counter; bodies must only touch their own slot of any output.
void parallelFor(std::size_t count, std::uint32_t workers,
                 const std::function<void(std::size_t)>& body)
{
    if (workers <= 1 || count <= 1) {
        for (std::size_t idx = 0; idx < count; ++idx)
            body(idx);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= count)
                return;
            body(idx);
        }
    };
    std::vector<std::thread> threads;
    std::size_t spawn = std::min<std::size_t>(workers, count);
    threads.reserve(spawn);
    for (std::size_t w = 0; w < spawn; ++w)
        threads.emplace_back(worker);
    for (std::thread& t : threads)
        t.join();
}

const BchCode& codeForLength(std::uint32_t length)
{
    switch (length) {
    case 511:
        return BchCode::code511_19();
    case 31:
        return BchCode::code31_6();
    case 15:
        return BchCode::code15_5();
    default:
        throw std::domain_error("runFvcProtocol: unsupported code length "
                                + std::to_string(length));
    }
}

// One enrollment slot: at most one of the scheme members is engaged.
struct EnrollmentSlot {
    bool attempted = false;
    bool ok = false;
    std::optional<ClassicEnrollment> classic;
    std::optional<DescriptorVault> hardened;
    std::optional<GridEnrollment> grid;
};

} // namespace

Dataset loadDataset(const std::string& dir, std::size_t descriptorBits)
{
    if (!fs::is_directory(dir))
        throw ParseError("loadDataset: not a directory: " + dir);

    static const std::regex pattern(R"(^finger([0-9]+)_imp([0-9]+)\.txt$)");
    std::map<std::uint32_t, std::map<std::uint32_t, fs::path>> layout;
    for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        std::string name = entry.path().filename().string();
        std::smatch match;
        if (!std::regex_match(name, match, pattern))
            continue;
        unsigned long fingerId = 0;
        unsigned long impressionId = 0;
        try {
            fingerId = std::stoul(match[1].str());
            impressionId = std::stoul(match[2].str());
        } catch (const std::out_of_range&) {
            throw ParseError("loadDataset: index out of range in " + name);
        }
        if (fingerId == 0 || impressionId == 0)
            throw ParseError("loadDataset: indices are 1-based in " + name);
        layout[static_cast<std::uint32_t>(fingerId)][static_cast<std::uint32_t>(impressionId)] =
            entry.path();
    }
    if (layout.empty())
        throw ParseError("loadDataset: no finger<I>_imp<J>.txt files in " + dir);

    Dataset dataset;
    std::uint32_t expectedFinger = 1;
    for (const auto& [fingerId, impressions] : layout) {
        if (fingerId != expectedFinger)
            throw ParseError("loadDataset: missing finger" + std::to_string(expectedFinger));
        ++expectedFinger;

        FingerRecord finger;
        finger.fingerId = fingerId;
        std::uint32_t expectedImpression = 1;
        for (const auto& [impressionId, path] : impressions) {
            if (impressionId != expectedImpression)
                throw ParseError("loadDataset: missing finger" + std::to_string(fingerId)
                                 + "_imp" + std::to_string(expectedImpression));
            ++expectedImpression;

            ImpressionRecord record;
            record.path = path.string();
            record.tmpl = readTemplate(record.path);
            if (dataset.width == 0 && dataset.height == 0) {
                dataset.width = record.tmpl.width;
                dataset.height = record.tmpl.height;
            } else if (record.tmpl.width != dataset.width
                       || record.tmpl.height != dataset.height) {
                throw ParseError("loadDataset: inconsistent region in " + record.path);
            }

            fs::path stem = path;
            stem.replace_extension(); // strip ".txt"
            fs::path transformPath = stem;
            transformPath += ".transform.txt";
            if (fs::is_regular_file(transformPath)) {
                record.transform = readTransform(transformPath.string());
                record.hasTransform = true;
            }
            if (descriptorBits > 0) {
                fs::path descPath = stem;
                descPath += ".desc.txt";
                if (!fs::is_regular_file(descPath))
                    throw ParseError("loadDataset: missing descriptor sidecar "
                                     + descPath.string());
                record.descriptors = readDescriptors(descPath.string(), descriptorBits);
                if (record.descriptors.size() != record.tmpl.minutiae.size())
                    throw ParseError("loadDataset: descriptor count != minutia count in "
                                     + descPath.string());
            }
            finger.impressions.push_back(std::move(record));
        }
        dataset.fingers.push_back(std::move(finger));
    }
    return dataset;
}

EvaluationReport runFvcProtocol(const Dataset& dataset, const EvalConfig& config)
{
    const std::size_t fingerCount = dataset.fingers.size();
    const std::uint32_t secretK =
        config.scheme == Scheme::Grid ? config.gridParams.k : config.classicParams.k;
    const BchCode* code =
        config.scheme == Scheme::Descriptor ? &codeForLength(config.bchLength) : nullptr;

    if (config.scheme == Scheme::Descriptor)
        for (const FingerRecord& finger : dataset.fingers)
            for (const ImpressionRecord& imp : finger.impressions)
                if (imp.descriptors.size() != imp.tmpl.minutiae.size())
                    throw std::domain_error(
                        "runFvcProtocol: descriptor scheme needs one descriptor per minutia ("
                        + imp.path + ")");

    // Phase 1: enroll every impression that serves as a reference — all but
    // the last impression of each finger (the first alone when there is only
    // one). Failures count toward ftc and knock out the affected attempts.
    std::vector<std::vector<EnrollmentSlot>> slots(fingerCount);
    std::vector<std::pair<std::size_t, std::size_t>> enrollTasks;
    for (std::size_t f = 0; f < fingerCount; ++f) {
        const std::size_t m = dataset.fingers[f].impressions.size();
        slots[f].resize(m);
        const std::size_t enrollCount = m >= 2 ? m - 1 : 1;
        for (std::size_t i = 0; i < enrollCount; ++i)
            enrollTasks.emplace_back(f, i);
    }

    parallelFor(enrollTasks.size(), config.workers, [&](std::size_t idx) {
        const auto [f, i] = enrollTasks[idx];
        const ImpressionRecord& imp = dataset.fingers[f].impressions[i];
        EnrollmentSlot& slot = slots[f][i];
        slot.attempted = true;

        Rng secretRng = Rng::fork(config.seed, streamId(kStreamSecret, f, i));
        Polynomial secret = Polynomial::random(secretK, secretRng);
        const std::uint64_t enrollSeed = deriveSeed(config.seed, streamId(kStreamEnroll, f, i));

        try {
            switch (config.scheme) {
            case Scheme::Classic:
                slot.classic = enrollClassic(imp.tmpl, config.classicParams, secret, enrollSeed);
                break;
            case Scheme::Descriptor: {
                ClassicEnrollment e =
                    enrollClassic(imp.tmpl, config.classicParams, secret, enrollSeed);
                std::vector<Descriptor> genuine;
                genuine.reserve(e.genuineTemplateIndices.size());
                for (std::size_t templateIndex : e.genuineTemplateIndices)
                    genuine.push_back(imp.descriptors[templateIndex]);
                slot.hardened = hardenVault(e, genuine, *code,
                                            deriveSeed(config.seed,
                                                       streamId(kStreamHarden, f, i)));
                break;
            }
            case Scheme::Grid:
                slot.grid = gridEnroll(imp.tmpl, config.gridParams, secret, enrollSeed);
                break;
            }
            slot.ok = true;
        } catch (const FailureToCapture&) {
            slot.ok = false;
        } catch (const ChaffPlacementFailure&) {
            slot.ok = false;
        }
    });

    EvaluationReport report;
    report.fingers = fingerCount;
    for (const FingerRecord& finger : dataset.fingers)
        report.impressions += finger.impressions.size();
    for (const std::vector<EnrollmentSlot>& fingerSlots : slots)
        for (const EnrollmentSlot& slot : fingerSlots)
            if (slot.attempted) {
                ++report.ftc.trials;
                if (!slot.ok)
                    ++report.ftc.successes;
            }

    // One verification attempt: unlock the enrolled vault with a query
    // template (plus descriptors for the hardened scheme).
    auto unlock = [&](const EnrollmentSlot& slot, const MinutiaeTemplate& query,
                      const std::vector<Descriptor>& queryDescriptors,
                      std::uint64_t decodeSeed) -> DecodeOutcome {
        switch (config.scheme) {
        case Scheme::Classic: {
            const ClassicVault& vault = slot.classic->vault;
            if (config.decoder == DecoderKind::Exhaustive)
                return unlockClassic(vault, query, config.budget);
            std::vector<VaultPoint> points = buildUnlockingSet(vault, query).points();
            return randomizedDecode(points, vault.params.k, vault.digest,
                                    config.randomizedDraws, decodeSeed);
        }
        case Scheme::Descriptor: {
            const DescriptorVault& vault = *slot.hardened;
            if (config.decoder == DecoderKind::Exhaustive)
                return unlockHardened(vault, query, queryDescriptors, config.budget);
            std::vector<VaultPoint> points =
                recoverHardenedPoints(vault, query, queryDescriptors);
            return randomizedDecode(points, vault.params.k, vault.digest,
                                    config.randomizedDraws, decodeSeed);
        }
        case Scheme::Grid: {
            const GridVault& vault = slot.grid->vault;
            if (config.decoder == DecoderKind::Exhaustive)
                return gridUnlockExhaustive(vault, query, config.budget);
            return gridUnlock(vault, query, config.randomizedDraws, decodeSeed);
        }
        }
        throw std::logic_error("runFvcProtocol: unreachable scheme");
    };

    // Phase 2: genuine attempts — impressions (i, j), i < j, of one finger,
    // with the query moved into the reference frame when both ground-truth
    // motions are known.
    struct GenuineTask {
        std::size_t f, i, j;
    };
    std::vector<GenuineTask> genuineTasks;
    for (std::size_t f = 0; f < fingerCount; ++f) {
        const std::size_t m = dataset.fingers[f].impressions.size();
        for (std::size_t i = 0; i + 1 < m; ++i) {
            if (!slots[f][i].ok)
                continue;
            for (std::size_t j = i + 1; j < m; ++j)
                genuineTasks.push_back({f, i, j});
        }
    }
    std::vector<std::uint8_t> genuineSuccess(genuineTasks.size(), 0);
    std::vector<double> genuineSeconds(genuineTasks.size(), 0.0);
    parallelFor(genuineTasks.size(), config.workers, [&](std::size_t idx) {
        const GenuineTask& task = genuineTasks[idx];
        const ImpressionRecord& reference = dataset.fingers[task.f].impressions[task.i];
        const ImpressionRecord& probe = dataset.fingers[task.f].impressions[task.j];

        MinutiaeTemplate query = probe.tmpl;
        if (reference.hasTransform && probe.hasTransform)
            query = applyTransform(
                query, composeTransforms(reference.transform, invertTransform(probe.transform)));

        const std::uint64_t decodeSeed =
            deriveSeed(config.seed, streamId(kStreamGenuine, task.f, task.i, task.j));
        auto start = std::chrono::steady_clock::now();
        DecodeOutcome outcome =
            unlock(slots[task.f][task.i], query, probe.descriptors, decodeSeed);
        auto stop = std::chrono::steady_clock::now();
        genuineSuccess[idx] = outcome.success() ? 1 : 0;
        genuineSeconds[idx] = std::chrono::duration<double>(stop - start).count();
    });

    double genuineTotalSeconds = 0.0;
    for (std::size_t idx = 0; idx < genuineTasks.size(); ++idx) {
        ++report.gar.trials;
        report.gar.successes += genuineSuccess[idx];
        genuineTotalSeconds += genuineSeconds[idx];
        if (genuineTasks[idx].i == 0 && genuineTasks[idx].j == 1) {
            ++report.subGar.trials;
            report.subGar.successes += genuineSuccess[idx];
        }
    }
    if (!genuineTasks.empty())
        report.genuineDecodeSeconds = genuineTotalSeconds / double(genuineTasks.size());

    // Phase 3: impostor attempts — first impressions of finger pairs I < J,
    // lower index enrolls, no alignment.
    struct ImpostorTask {
        std::size_t enrollee, prober;
    };
    std::vector<ImpostorTask> impostorTasks;
    for (std::size_t enrollee = 0; enrollee < fingerCount; ++enrollee) {
        if (!slots[enrollee][0].ok)
            continue;
        for (std::size_t prober = enrollee + 1; prober < fingerCount; ++prober)
            impostorTasks.push_back({enrollee, prober});
    }
    std::vector<std::uint8_t> impostorSuccess(impostorTasks.size(), 0);
    std::vector<double> impostorSeconds(impostorTasks.size(), 0.0);
    parallelFor(impostorTasks.size(), config.workers, [&](std::size_t idx) {
        const ImpostorTask& task = impostorTasks[idx];
        const ImpressionRecord& probe = dataset.fingers[task.prober].impressions[0];
        const std::uint64_t decodeSeed =
            deriveSeed(config.seed, streamId(kStreamImpostor, task.enrollee, task.prober));
        auto start = std::chrono::steady_clock::now();
        DecodeOutcome outcome =
            unlock(slots[task.enrollee][0], probe.tmpl, probe.descriptors, decodeSeed);
        auto stop = std::chrono::steady_clock::now();
        impostorSuccess[idx] = outcome.success() ? 1 : 0;
        impostorSeconds[idx] = std::chrono::duration<double>(stop - start).count();
    });

    double impostorTotalSeconds = 0.0;
    for (std::size_t idx = 0; idx < impostorTasks.size(); ++idx) {
        ++report.far.trials;
        report.far.successes += impostorSuccess[idx];
        impostorTotalSeconds += impostorSeconds[idx];
    }
    if (!impostorTasks.empty())
        report.impostorDecodeSeconds = impostorTotalSeconds / double(impostorTasks.size());

    return report;
}

UnlockingStats runUnlockingStats(const Dataset& dataset, const GridParams& params,
                                 std::uint64_t draws)
{
    HexGrid grid = buildHexGrid(params.lambda, params.width, params.height);

    std::vector<FeatureSet> features;
    features.reserve(dataset.fingers.size());
    for (const FingerRecord& finger : dataset.fingers) {
        if (finger.impressions.empty())
            throw std::domain_error("runUnlockingStats: finger without impressions");
        features.push_back(
            extractFeatureSet(finger.impressions[0].tmpl, grid, params.s, params.tMax));
    }

    UnlockingStats stats;
    for (std::size_t enrollee = 0; enrollee < features.size(); ++enrollee) {
        const FeatureSet& enrolled = features[enrollee];
        if (enrolled.size() < params.k)
            continue; // enrollment would fail to capture
        for (std::size_t prober = enrollee + 1; prober < features.size(); ++prober) {
            const FeatureSet& query = features[prober];
            std::vector<std::uint32_t> common;
            std::set_intersection(enrolled.labels.begin(), enrolled.labels.end(),
                                  query.labels.begin(), query.labels.end(),
                                  std::back_inserter(common));
            stats.entries.push_back({static_cast<std::uint32_t>(query.size()),
                                     static_cast<std::uint32_t>(common.size())});
        }
    }
    stats.cost = faCostRandomizedDecoder(stats.entries, params.k, draws);
    return stats;
}

} // namespace fpvault

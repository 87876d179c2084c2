// fpvault — command line front end for the fuzzy vault toolkit: synthetic
// dataset generation, enrollment/verification for all three schemes, FVC
// protocol evaluation, the attack suite, grid parameter training, interval
// statistics, and the closed-form security tables.
//
// Exit codes: 0 success/accept, 1 reject or failed attack, 2 usage error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpvault/attacks.hpp"
#include "fpvault/bch.hpp"
#include "fpvault/classic_vault.hpp"
#include "fpvault/combinatorics.hpp"
#include "fpvault/descriptor_vault.hpp"
#include "fpvault/errors.hpp"
#include "fpvault/eval.hpp"
#include "fpvault/field.hpp"
#include "fpvault/grid_vault.hpp"
#include "fpvault/minutia.hpp"
#include "fpvault/rng.hpp"
#include "fpvault/stats.hpp"
#include "fpvault/synth.hpp"

using nlohmann::json;
using namespace fpvault;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitReject = 1;
constexpr int kExitUsage = 2;

std::vector<std::uint8_t> readBlob(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void writeBlob(const std::string& path, const std::vector<std::uint8_t>& blob)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size()));
}

// Scheme discriminator byte of a serialized vault: "FPVT" + version + scheme.
std::uint8_t vaultScheme(const std::vector<std::uint8_t>& blob)
{
    if (blob.size() < 6 || blob[0] != 'F' || blob[1] != 'P' || blob[2] != 'V'
        || blob[3] != 'T')
        throw ParseError("not a vault record");
    return blob[5];
}

std::string hexBytes(const std::uint8_t* data, std::size_t size)
{
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * size);
    for (std::size_t i = 0; i < size; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0xF]);
    }
    return out;
}

json digestJson(const SecretDigest& digest)
{
    return hexBytes(digest.bytes.data(), digest.bytes.size());
}

json polynomialJson(const Polynomial& f)
{
    json coeffs = json::array();
    for (FieldElement c : f.coefficients())
        coeffs.push_back(c.value);
    return coeffs;
}

// JSON has no infinity literal; report unbounded costs as a string.
json finiteJson(double value)
{
    if (std::isfinite(value))
        return value;
    return value > 0 ? "inf" : "-inf";
}

json trialJson(const TrialRecord& r)
{
    json out;
    out["successes"] = r.successes;
    out["trials"] = r.trials;
    out["rate"] = r.trials ? pointEstimate(r) : 0.0;
    return out;
}

const char* failureName(DecodeFailure f)
{
    switch (f) {
    case DecodeFailure::None:
        return "none";
    case DecodeFailure::TooFewPoints:
        return "too-few-points";
    case DecodeFailure::BudgetExhausted:
        return "budget-exhausted";
    case DecodeFailure::SearchExhausted:
        return "search-exhausted";
    }
    return "unknown";
}

json outcomeJson(const DecodeOutcome& outcome)
{
    json out;
    out["success"] = outcome.success();
    out["subsetsTried"] = outcome.subsetsTried;
    out["failure"] = failureName(outcome.failure);
    return out;
}

json attackJson(const AttackReport& report)
{
    json out;
    out["success"] = report.success;
    out["iterations"] = report.iterations;
    out["wallSeconds"] = report.wallSeconds;
    out["perCoreRate"] = report.perCoreRate;
    if (report.recoveredSecret)
        out["recoveredSecret"] = polynomialJson(*report.recoveredSecret);
    for (const auto& [key, value] : report.metadata)
        out["metadata"][key] = value;
    return out;
}

void emit(const json& doc)
{
    std::cout << doc.dump(2) << "\n";
}

// --- synth --------------------------------------------------------------------

struct SynthOptions {
    std::string outDir;
    std::uint32_t fingers = 10;
    std::uint32_t impressions = 8;
    std::uint32_t minutiae = 40;
    std::uint32_t width = 296;
    std::uint32_t height = 560;
    double minSeparation = 25.0;
    double posNoise = 4.0;
    double angNoise = 8.0;
    double dropRate = 0.2;
    std::uint32_t spurious = 4;
    double qualityNoise = 0.05;
    double maxShift = 20.0;
    double maxRotation = 15.0;
    std::uint32_t descriptorBits = 0;
    double descriptorFlipRate = 0.08;
    std::uint64_t seed = 1;
};

// Seed streams for dataset generation, disjoint from the evaluation streams.
constexpr std::uint64_t kSynthMaster = 11;
constexpr std::uint64_t kSynthImpression = 12;
constexpr std::uint64_t kSynthMotion = 13;
constexpr std::uint64_t kSynthDescriptor = 14;

int runSynth(const SynthOptions& opt)
{
    namespace fs = std::filesystem;
    fs::create_directories(opt.outDir);

    auto stream = [](std::uint64_t tag, std::uint64_t f, std::uint64_t j = 0) {
        return (tag << 48) | (f << 32) | (j << 16);
    };

    std::uint64_t files = 0;
    for (std::uint32_t f = 1; f <= opt.fingers; ++f) {
        MinutiaeTemplate master =
            synthesizeFinger(Rng::fork(opt.seed, stream(kSynthMaster, f)).nextU64(),
                             opt.minutiae, opt.width, opt.height, opt.minSeparation);

        std::vector<Descriptor> masterDescriptors;
        if (opt.descriptorBits > 0) {
            Rng rng = Rng::fork(opt.seed, stream(kSynthDescriptor, f));
            masterDescriptors.reserve(master.minutiae.size());
            for (std::size_t i = 0; i < master.minutiae.size(); ++i)
                masterDescriptors.push_back(randomDescriptor(opt.descriptorBits, rng));
        }

        for (std::uint32_t j = 1; j <= opt.impressions; ++j) {
            Rng motionRng = Rng::fork(opt.seed, stream(kSynthMotion, f, j));
            RigidTransform motion;
            motion.dx = (2.0 * motionRng.unitReal() - 1.0) * opt.maxShift;
            motion.dy = (2.0 * motionRng.unitReal() - 1.0) * opt.maxShift;
            motion.rotationDeg = (2.0 * motionRng.unitReal() - 1.0) * opt.maxRotation;
            motion.cx = opt.width / 2.0;
            motion.cy = opt.height / 2.0;

            SynthesizedImpression imp = synthesizeImpression(
                master, Rng::fork(opt.seed, stream(kSynthImpression, f, j)).nextU64(),
                opt.posNoise, opt.angNoise, opt.dropRate, opt.spurious, motion,
                opt.qualityNoise);

            std::string base = opt.outDir + "/finger" + std::to_string(f) + "_imp"
                               + std::to_string(j);
            writeTemplate(base + ".txt", imp.tmpl);
            writeTransform(base + ".transform.txt", motion);
            files += 2;

            if (opt.descriptorBits > 0) {
                Rng descRng = Rng::fork(opt.seed, stream(kSynthDescriptor, f, j));
                std::vector<Descriptor> descriptors;
                descriptors.reserve(imp.tmpl.minutiae.size());
                for (int src : imp.sourceIndex)
                    descriptors.push_back(
                        src >= 0 ? perturbDescriptor(masterDescriptors[std::size_t(src)],
                                                     opt.descriptorFlipRate, descRng)
                                 : randomDescriptor(opt.descriptorBits, descRng));
                writeDescriptors(base + ".desc.txt", descriptors);
                ++files;
            }
        }
    }

    json doc;
    doc["dataset"] = opt.outDir;
    doc["fingers"] = opt.fingers;
    doc["impressions"] = opt.impressions;
    doc["filesWritten"] = files;
    doc["region"] = {opt.width, opt.height};
    doc["descriptorBits"] = opt.descriptorBits;
    emit(doc);
    return kExitOk;
}

// --- enroll / verify -----------------------------------------------------------

struct SchemeOptions {
    std::string scheme = "classic";
    ClassicVaultParams classic;
    GridParams grid;
    std::uint32_t codeLength = 511;
};

const BchCode& codeByLength(std::uint32_t length)
{
    switch (length) {
    case 511:
        return BchCode::code511_19();
    case 31:
        return BchCode::code31_6();
    case 15:
        return BchCode::code15_5();
    default:
        throw CLI::ValidationError("--code", "supported code lengths: 511, 31, 15");
    }
}

int runEnroll(const SchemeOptions& opt, const std::string& templatePath,
              const std::string& vaultPath, const std::string& descriptorPath,
              const std::string& secretOutPath, std::uint64_t seed)
{
    MinutiaeTemplate tmpl = readTemplate(templatePath);
    const std::uint32_t k = opt.scheme == "grid" ? opt.grid.k : opt.classic.k;
    Rng secretRng = Rng::fork(seed, 0);
    Polynomial secret = Polynomial::random(k, secretRng);
    const std::uint64_t enrollSeed = Rng::fork(seed, 1).nextU64();

    json doc;
    doc["scheme"] = opt.scheme;
    doc["template"] = templatePath;
    doc["vault"] = vaultPath;

    try {
        if (opt.scheme == "classic") {
            ClassicEnrollment e = enrollClassic(tmpl, opt.classic, secret, enrollSeed);
            writeBlob(vaultPath, serializeClassicVault(e.vault));
            doc["n"] = e.vault.points.size();
            doc["t"] = e.genuineVaultIndices.size();
            doc["k"] = opt.classic.k;
            doc["digest"] = digestJson(e.vault.digest);
        } else if (opt.scheme == "descriptor") {
            if (descriptorPath.empty())
                throw CLI::ValidationError("--descriptors",
                                           "required for the descriptor scheme");
            const BchCode& code = codeByLength(opt.codeLength);
            std::vector<Descriptor> descriptors =
                readDescriptors(descriptorPath, code.length());
            if (descriptors.size() != tmpl.minutiae.size())
                throw ParseError("descriptor count != minutia count");
            ClassicEnrollment e = enrollClassic(tmpl, opt.classic, secret, enrollSeed);
            std::vector<Descriptor> genuine;
            genuine.reserve(e.genuineTemplateIndices.size());
            for (std::size_t idx : e.genuineTemplateIndices)
                genuine.push_back(descriptors[idx]);
            DescriptorVault vault =
                hardenVault(e, genuine, code, Rng::fork(seed, 2).nextU64());
            writeBlob(vaultPath, serializeDescriptorVault(vault));
            doc["n"] = vault.entries.size();
            doc["t"] = e.genuineVaultIndices.size();
            doc["k"] = opt.classic.k;
            doc["code"] = {code.length(), code.dimension(), code.correctable()};
            doc["digest"] = digestJson(vault.digest);
        } else if (opt.scheme == "grid") {
            GridParams params = opt.grid;
            params.width = tmpl.width;
            params.height = tmpl.height;
            GridEnrollment e = gridEnroll(tmpl, params, secret, enrollSeed);
            writeBlob(vaultPath, serializeGridVault(e.vault));
            doc["n"] = e.vault.ordinates.size();
            doc["t"] = e.features.size();
            doc["k"] = params.k;
            doc["digest"] = digestJson(e.vault.digest);
        } else {
            throw CLI::ValidationError("--scheme", "unknown scheme " + opt.scheme);
        }
    } catch (const FailureToCapture& err) {
        doc["enrolled"] = false;
        doc["error"] = err.what();
        emit(doc);
        return kExitReject;
    } catch (const ChaffPlacementFailure& err) {
        doc["enrolled"] = false;
        doc["error"] = err.what();
        emit(doc);
        return kExitReject;
    }

    if (!secretOutPath.empty()) {
        std::ofstream out(secretOutPath);
        for (FieldElement c : secret.coefficients())
            out << std::hex << c.value << "\n";
    }
    doc["enrolled"] = true;
    emit(doc);
    return kExitOk;
}

int runVerify(const std::string& vaultPath, const std::string& queryPath,
              const std::string& descriptorPath, const std::string& decoder,
              std::uint64_t draws, std::optional<std::uint64_t> budget, std::uint64_t seed)
{
    std::vector<std::uint8_t> blob = readBlob(vaultPath);
    MinutiaeTemplate query = readTemplate(queryPath);
    const std::uint64_t decodeSeed = Rng::fork(seed, 3).nextU64();
    const bool randomized = decoder == "randomized";

    DecodeOutcome outcome;
    switch (vaultScheme(blob)) {
    case 1: {
        ClassicVault vault = deserializeClassicVault(blob);
        if (randomized)
            outcome = randomizedDecode(buildUnlockingSet(vault, query).points(),
                                       vault.params.k, vault.digest, draws, decodeSeed);
        else
            outcome = unlockClassic(vault, query, budget);
        break;
    }
    case 2: {
        DescriptorVault vault = deserializeDescriptorVault(blob);
        if (descriptorPath.empty())
            throw CLI::ValidationError("--descriptors",
                                       "required for descriptor vault records");
        std::vector<Descriptor> descriptors =
            readDescriptors(descriptorPath, vault.code.length);
        if (randomized)
            outcome = randomizedDecode(recoverHardenedPoints(vault, query, descriptors),
                                       vault.params.k, vault.digest, draws, decodeSeed);
        else
            outcome = unlockHardened(vault, query, descriptors, budget);
        break;
    }
    case 3: {
        GridVault vault = deserializeGridVault(blob);
        outcome = randomized ? gridUnlock(vault, query, draws, decodeSeed)
                             : gridUnlockExhaustive(vault, query, budget);
        break;
    }
    default:
        throw ParseError("unknown vault scheme in " + vaultPath);
    }

    json doc = outcomeJson(outcome);
    doc["vault"] = vaultPath;
    doc["query"] = queryPath;
    if (outcome.secret)
        doc["recoveredSecret"] = polynomialJson(*outcome.secret);
    emit(doc);
    return outcome.success() ? kExitOk : kExitReject;
}

// --- eval ----------------------------------------------------------------------

int runEval(const std::string& datasetDir, const SchemeOptions& opt,
            std::vector<std::uint32_t> kValues, const std::string& decoder,
            std::uint64_t draws, std::optional<std::uint64_t> budget, std::uint64_t seed,
            std::uint32_t cores, bool omitTimings)
{
    Scheme scheme;
    std::size_t descriptorBits = 0;
    if (opt.scheme == "classic") {
        scheme = Scheme::Classic;
    } else if (opt.scheme == "descriptor") {
        scheme = Scheme::Descriptor;
        descriptorBits = codeByLength(opt.codeLength).length();
    } else if (opt.scheme == "grid") {
        scheme = Scheme::Grid;
    } else {
        throw CLI::ValidationError("--scheme", "unknown scheme " + opt.scheme);
    }

    Dataset dataset = loadDataset(datasetDir, descriptorBits);

    if (kValues.empty())
        kValues.push_back(opt.scheme == "grid" ? opt.grid.k : opt.classic.k);

    json doc;
    doc["dataset"] = datasetDir;
    doc["scheme"] = opt.scheme;
    doc["decoder"] = decoder;
    doc["seed"] = seed;
    doc["fingers"] = dataset.fingers.size();
    json rows = json::array();

    for (std::uint32_t k : kValues) {
        EvalConfig config;
        config.scheme = scheme;
        config.classicParams = opt.classic;
        config.classicParams.k = k;
        config.gridParams = opt.grid;
        config.gridParams.width = dataset.width;
        config.gridParams.height = dataset.height;
        config.gridParams.k = k;
        config.bchLength = opt.codeLength;
        config.decoder =
            decoder == "randomized" ? DecoderKind::Randomized : DecoderKind::Exhaustive;
        config.randomizedDraws = draws;
        config.budget = budget;
        config.seed = seed;
        config.workers = cores;

        EvaluationReport report = runFvcProtocol(dataset, config);
        json row;
        row["k"] = k;
        row["gar"] = trialJson(report.gar);
        row["subGar"] = trialJson(report.subGar);
        row["far"] = trialJson(report.far);
        row["ftc"] = trialJson(report.ftc);
        if (!omitTimings) {
            row["gdtSeconds"] = report.genuineDecodeSeconds;
            row["idtSeconds"] = report.impostorDecodeSeconds;
        }
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    emit(doc);
    return kExitOk;
}

int runUnlockStats(const std::string& datasetDir, const GridParams& params,
                   std::uint64_t draws, bool listEntries)
{
    Dataset dataset = loadDataset(datasetDir);
    GridParams effective = params;
    effective.width = dataset.width;
    effective.height = dataset.height;
    UnlockingStats stats = runUnlockingStats(dataset, effective, draws);

    json doc;
    doc["dataset"] = datasetDir;
    doc["pairs"] = stats.entries.size();
    doc["draws"] = draws;
    doc["far"] = stats.cost.far;
    doc["medianAttempts"] = finiteJson(stats.cost.medianAttempts);
    doc["costIterations"] = finiteJson(stats.cost.costIterations);
    doc["farSingleDraw"] = stats.cost.farSingleDraw;
    doc["costIterationsSingleDraw"] = finiteJson(stats.cost.costIterationsSingleDraw);
    if (listEntries) {
        json entries = json::array();
        for (const UnlockingStatsEntry& e : stats.entries)
            entries.push_back({e.t, e.omega});
        doc["entries"] = std::move(entries);
    }
    emit(doc);
    return kExitOk;
}

// --- attacks -------------------------------------------------------------------

// Published point list + polynomial parameters of any vault record that
// exposes plain points (classic and grid; descriptor records hide ordinates).
struct PointTarget {
    std::vector<VaultPoint> points;
    std::uint32_t n = 0;
    std::uint32_t t = 0;
    std::uint32_t k = 0;
    SecretDigest digest;
};

PointTarget pointTarget(const std::vector<std::uint8_t>& blob)
{
    PointTarget target;
    switch (vaultScheme(blob)) {
    case 1: {
        ClassicVault vault = deserializeClassicVault(blob);
        target.points = vault.points;
        target.n = static_cast<std::uint32_t>(vault.points.size());
        target.t = vault.params.tMax;
        target.k = vault.params.k;
        target.digest = vault.digest;
        break;
    }
    case 3: {
        GridVault vault = deserializeGridVault(blob);
        target.points.reserve(vault.ordinates.size());
        for (std::size_t i = 0; i < vault.ordinates.size(); ++i)
            target.points.push_back(
                {FieldElement{static_cast<std::uint16_t>(i)}, vault.ordinates[i]});
        target.n = static_cast<std::uint32_t>(vault.ordinates.size());
        target.t = vault.params.tMax;
        target.k = vault.params.k;
        target.digest = vault.digest;
        break;
    }
    default:
        throw ParseError("brute force needs a vault with published points");
    }
    return target;
}

int runAttackBf(const std::string& vaultPath, std::uint64_t maxIterations,
                std::uint64_t seed, std::uint32_t cores)
{
    PointTarget target = pointTarget(readBlob(vaultPath));
    AttackReport report = bruteForceAttack(target.points, target.k, target.digest, seed,
                                           maxIterations, cores);
    BfSecurity security = bfSecurity(target.n, target.t, target.k);

    json doc = attackJson(report);
    doc["vault"] = vaultPath;
    doc["security"] = finiteJson(security.value);
    doc["securityLog2"] = security.log2Value;
    doc["expectedIterations"] = expectedBfIterations(target.n, target.t, target.k);
    emit(doc);
    return report.success ? kExitOk : kExitReject;
}

int runAttackFa(const std::string& vaultPath, const std::string& datasetDir,
                const std::string& decoder, std::uint64_t draws,
                std::optional<std::uint64_t> budget, std::uint64_t seed)
{
    std::vector<std::uint8_t> blob = readBlob(vaultPath);
    const std::uint8_t scheme = vaultScheme(blob);
    Dataset dataset = loadDataset(
        datasetDir, scheme == 2 ? deserializeDescriptorVault(blob).code.length : 0);

    // Queries: every impression in the dataset, finger-major order.
    std::vector<MinutiaeTemplate> queries;
    std::vector<const std::vector<Descriptor>*> queryDescriptors;
    for (const FingerRecord& finger : dataset.fingers)
        for (const ImpressionRecord& imp : finger.impressions) {
            queries.push_back(imp.tmpl);
            queryDescriptors.push_back(&imp.descriptors);
        }

    const bool randomized = decoder == "randomized";
    std::size_t cursor = 0; // falseAcceptAttack consumes queries in order
    std::function<DecodeOutcome(const MinutiaeTemplate&)> authenticate;

    if (scheme == 1) {
        ClassicVault vault = deserializeClassicVault(blob);
        authenticate = [vault, randomized, draws, budget, seed,
                        &cursor](const MinutiaeTemplate& query) {
            const std::uint64_t decodeSeed = Rng::fork(seed, 0x40000 + cursor++).nextU64();
            if (randomized)
                return randomizedDecode(buildUnlockingSet(vault, query).points(),
                                        vault.params.k, vault.digest, draws, decodeSeed);
            return unlockClassic(vault, query, budget);
        };
    } else if (scheme == 2) {
        DescriptorVault vault = deserializeDescriptorVault(blob);
        authenticate = [vault, randomized, draws, budget, seed, &cursor,
                        &queryDescriptors](const MinutiaeTemplate& query) {
            const std::size_t index = cursor++;
            const std::uint64_t decodeSeed = Rng::fork(seed, 0x40000 + index).nextU64();
            const std::vector<Descriptor>& descriptors = *queryDescriptors[index];
            if (randomized)
                return randomizedDecode(recoverHardenedPoints(vault, query, descriptors),
                                        vault.params.k, vault.digest, draws, decodeSeed);
            return unlockHardened(vault, query, descriptors, budget);
        };
    } else {
        GridVault vault = deserializeGridVault(blob);
        authenticate = [vault, randomized, draws, budget, seed,
                        &cursor](const MinutiaeTemplate& query) {
            const std::uint64_t decodeSeed = Rng::fork(seed, 0x40000 + cursor++).nextU64();
            if (randomized)
                return gridUnlock(vault, query, draws, decodeSeed);
            return gridUnlockExhaustive(vault, query, budget);
        };
    }

    AttackReport report = falseAcceptAttack(authenticate, queries);
    json doc = attackJson(report);
    doc["vault"] = vaultPath;
    doc["queries"] = queries.size();
    emit(doc);
    return report.success ? kExitOk : kExitReject;
}

int runAttackCorrelate(const std::string& vaultAPath, const std::string& vaultBPath,
                       std::optional<std::uint64_t> budget)
{
    std::vector<std::uint8_t> blobA = readBlob(vaultAPath);
    std::vector<std::uint8_t> blobB = readBlob(vaultBPath);
    if (vaultScheme(blobA) != vaultScheme(blobB))
        throw ParseError("correlation attack needs two records of the same scheme");

    AttackReport report;
    if (vaultScheme(blobA) == 1)
        report = correlationAttack(deserializeClassicVault(blobA),
                                   deserializeClassicVault(blobB), budget);
    else if (vaultScheme(blobA) == 3)
        report = correlationAttack(deserializeGridVault(blobA),
                                   deserializeGridVault(blobB), budget);
    else
        throw ParseError("correlation attack needs records with published minutiae");

    json doc = attackJson(report);
    doc["vaultA"] = vaultAPath;
    doc["vaultB"] = vaultBPath;
    emit(doc);
    return report.success ? kExitOk : kExitReject;
}

// --- train-grid ----------------------------------------------------------------

int runTrainGrid(const std::string& datasetDir, std::vector<double> lambdas,
                 std::vector<std::uint32_t> directions, std::vector<std::uint32_t> tMaxValues,
                 std::vector<std::uint32_t> kValues, bool fullTable)
{
    Dataset dataset = loadDataset(datasetDir);

    std::vector<GridTrainingSample> samples;
    samples.reserve(dataset.fingers.size());
    for (const FingerRecord& finger : dataset.fingers) {
        GridTrainingSample sample;
        for (const ImpressionRecord& imp : finger.impressions) {
            sample.impressions.push_back(imp.tmpl);
            sample.transforms.push_back(imp.hasTransform ? imp.transform
                                                         : RigidTransform::identity());
        }
        samples.push_back(std::move(sample));
    }

    GridSearchSpace space;
    space.lambdas = std::move(lambdas);
    space.directionLevels = std::move(directions);
    space.tMaxValues = std::move(tMaxValues);
    space.kValues = std::move(kValues);
    space.width = dataset.width;
    space.height = dataset.height;

    GridTrainingResult result = trainParameters(samples, space);

    json doc;
    doc["dataset"] = datasetDir;
    doc["best"] = {{"lambda", result.best.lambda},
                   {"s", result.best.s},
                   {"tMax", result.best.tMax},
                   {"k", result.best.k}};
    if (fullTable) {
        json rows = json::array();
        for (const GridScoreRow& row : result.table)
            rows.push_back({{"lambda", row.params.lambda},
                            {"s", row.params.s},
                            {"tMax", row.params.tMax},
                            {"k", row.params.k},
                            {"n", row.n},
                            {"gar", row.gar},
                            {"far", row.far}});
        doc["table"] = std::move(rows);
    }
    emit(doc);
    return kExitOk;
}

// --- stats ---------------------------------------------------------------------

json intervalJson(const ConfidenceInterval& ci)
{
    json out;
    out["lower"] = ci.lower;
    out["upper"] = ci.upper;
    out["level"] = ci.level;
    out["lowerPercent"] = 100.0 * ci.lower;
    out["upperPercent"] = 100.0 * ci.upper;
    return out;
}

// --- tables --------------------------------------------------------------------

// Vault parameters analyzed in the brute-force security survey.
struct SurveyRow {
    std::uint32_t n, t, k;
};
constexpr SurveyRow kBruteForceSurvey[] = {
    {218, 18, 9}, {224, 24, 9}, {224, 24, 8}, {224, 24, 9},
    {224, 24, 11}, {440, 40, 13}, {440, 40, 14},
};

// Hardened-vault survey: (224, 24, k) for k = 7..12 across the three codes.
constexpr std::uint32_t kHardenedKValues[] = {7, 8, 9, 10, 11, 12};

// Single-iteration false-accept rates surveyed for the randomized decoder,
// k = 7..12.
constexpr double kRandomizedFarSurvey[] = {8.31e-8, 8.87e-9, 8.53e-10,
                                           6.95e-11, 4.40e-12, 1.86e-13};

int runTables(int table, const std::string& format)
{
    json doc;
    doc["table"] = table;

    if (table == 2) {
        json rows = json::array();
        for (const SurveyRow& row : kBruteForceSurvey) {
            BfSecurity security = bfSecurity(row.n, row.t, row.k);
            rows.push_back({{"n", row.n},
                            {"t", row.t},
                            {"k", row.k},
                            {"security", security.value},
                            {"securityLog2", security.log2Value},
                            {"securityBits", std::llround(security.log2Value)},
                            {"expectedIterations", expectedBfIterations(row.n, row.t, row.k)}});
        }
        doc["rows"] = std::move(rows);
    } else if (table == 3) {
        const BinaryCodeSpec codes[] = {BchCode::code511_19().spec(),
                                        BchCode::code31_6().spec(),
                                        BchCode::code15_5().spec()};
        json rows = json::array();
        for (std::uint32_t k : kHardenedKValues) {
            json row;
            row["k"] = k;
            json cells = json::array();
            for (const BinaryCodeSpec& code : codes) {
                HardenedSecurity security = hardenedBruteForceSecurity(224, 24, k, 4.27, code);
                cells.push_back({{"code", {code.length, code.dimension, code.correctable}},
                                 {"securityLog2", security.log2Value},
                                 {"securityBits", std::llround(security.log2Value)}});
            }
            row["cells"] = std::move(cells);
            rows.push_back(std::move(row));
        }
        doc["rows"] = std::move(rows);
    } else if (table == 5) {
        json rows = json::array();
        std::uint32_t k = 7;
        for (double far : kRandomizedFarSurvey) {
            rows.push_back(
                {{"k", k++}, {"far", far}, {"expectedQueries", medianTrials(far)}});
        }
        doc["rows"] = std::move(rows);
    } else {
        throw CLI::ValidationError("--table", "supported tables: 2, 3, 5");
    }

    if (format == "text") {
        for (const json& row : doc["rows"]) {
            if (table == 2)
                std::printf("(%3u,%2u,%2u)  2^%-9.6f  expected %.6g\n", row["n"].get<unsigned>(),
                            row["t"].get<unsigned>(), row["k"].get<unsigned>(),
                            row["securityLog2"].get<double>(),
                            row["expectedIterations"].get<double>());
            else if (table == 3) {
                std::printf("k=%-2u ", row["k"].get<unsigned>());
                for (const json& cell : row["cells"])
                    std::printf(" 2^%-9.6f", cell["securityLog2"].get<double>());
                std::printf("\n");
            } else {
                std::printf("k=%-2u  FAR %.3g  queries %.6e\n", row["k"].get<unsigned>(),
                            row["far"].get<double>(), row["expectedQueries"].get<double>());
            }
        }
        return kExitOk;
    }
    emit(doc);
    return kExitOk;
}

std::uint32_t defaultCores()
{
    if (const char* env = std::getenv("FPVAULT_CORES")) {
        char* end = nullptr;
        unsigned long value = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && value >= 1 && value <= 4096)
            return static_cast<std::uint32_t>(value);
    }
    return 1;
}

void addClassicOptions(CLI::App* cmd, SchemeOptions& opt)
{
    cmd->add_option("--n", opt.classic.n, "Vault size (genuine + chaff)");
    cmd->add_option("--t-min", opt.classic.tMin, "Minimum genuine minutiae");
    cmd->add_option("--t-max", opt.classic.tMax, "Maximum genuine minutiae");
    cmd->add_option("--k", opt.classic.k, "Secret polynomial degree bound");
    cmd->add_option("--separation", opt.classic.separationThreshold,
                    "Well-separated dissimilarity threshold");
    cmd->add_option("--match-threshold", opt.classic.matchThreshold,
                    "Query-to-vault match radius");
    cmd->add_option("--code", opt.codeLength, "BCH code length (511, 31, 15)");
}

void addGridOptions(CLI::App* cmd, SchemeOptions& opt)
{
    cmd->add_option("--lambda", opt.grid.lambda, "Hexagonal grid pitch");
    cmd->add_option("--s", opt.grid.s, "Direction quantization levels");
    cmd->add_option("--grid-t-max", opt.grid.tMax, "Feature-set size cap");
    cmd->add_option("--grid-k", opt.grid.k, "Grid secret degree bound");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fuzzy vault toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::uint32_t cores = defaultCores();
    std::uint64_t budgetValue = 0;

    // synth
    SynthOptions synthOpt;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic minutiae dataset");
    synth->add_option("--out", synthOpt.outDir, "Output directory")->required();
    synth->add_option("--fingers", synthOpt.fingers, "Number of fingers");
    synth->add_option("--impressions", synthOpt.impressions, "Impressions per finger");
    synth->add_option("--minutiae", synthOpt.minutiae, "Minutiae per master template");
    synth->add_option("--width", synthOpt.width, "Region width in pixels");
    synth->add_option("--height", synthOpt.height, "Region height in pixels");
    synth->add_option("--min-separation", synthOpt.minSeparation,
                      "Pairwise dissimilarity floor");
    synth->add_option("--pos-noise", synthOpt.posNoise, "Position jitter sigma");
    synth->add_option("--ang-noise", synthOpt.angNoise, "Direction jitter sigma");
    synth->add_option("--drop-rate", synthOpt.dropRate, "Per-minutia drop probability");
    synth->add_option("--spurious", synthOpt.spurious, "Spurious minutiae per impression");
    synth->add_option("--quality-noise", synthOpt.qualityNoise, "Quality jitter sigma");
    synth->add_option("--max-shift", synthOpt.maxShift, "Motion translation bound");
    synth->add_option("--max-rotation", synthOpt.maxRotation, "Motion rotation bound");
    synth->add_option("--descriptor-bits", synthOpt.descriptorBits,
                      "Descriptor length (0 = none; 511, 31 or 15)");
    synth->add_option("--desc-flip", synthOpt.descriptorFlipRate,
                      "Per-bit descriptor flip rate between impressions");

    // enroll
    SchemeOptions enrollOpt;
    std::string templatePath, vaultPath, descriptorPath, secretOutPath;
    CLI::App* enroll = app.add_subcommand("enroll", "Enroll a template into a vault record");
    enroll->add_option("--template", templatePath, "Template file")->required();
    enroll->add_option("--vault", vaultPath, "Output vault record")->required();
    enroll->add_option("--scheme", enrollOpt.scheme, "classic | descriptor | grid");
    enroll->add_option("--descriptors", descriptorPath, "Descriptor sidecar file");
    enroll->add_option("--secret-out", secretOutPath, "Write the secret's coefficients");
    addClassicOptions(enroll, enrollOpt);
    addGridOptions(enroll, enrollOpt);

    // verify
    std::string queryPath, decoder = "exhaustive";
    std::uint64_t draws = 65536;
    CLI::App* verify = app.add_subcommand("verify", "Verify a query against a vault record");
    verify->add_option("--vault", vaultPath, "Vault record")->required();
    verify->add_option("--query", queryPath, "Query template")->required();
    verify->add_option("--descriptors", descriptorPath, "Query descriptor file");
    verify->add_option("--decoder", decoder, "exhaustive | randomized");
    verify->add_option("--draws", draws, "Randomized decoder draw count");

    // eval
    std::string datasetDir;
    SchemeOptions evalOpt;
    std::vector<std::uint32_t> evalKValues;
    bool omitTimings = false;
    CLI::App* eval = app.add_subcommand("eval", "Run the FVC protocol over a dataset");
    eval->add_option("--dataset", datasetDir, "Dataset directory")->required();
    eval->add_option("--scheme", evalOpt.scheme, "classic | descriptor | grid");
    eval->add_option("--k-values", evalKValues, "Degree bounds to evaluate")
        ->delimiter(',');
    eval->add_option("--decoder", decoder, "exhaustive | randomized");
    eval->add_option("--draws", draws, "Randomized decoder draw count");
    eval->add_flag("--omit-timings", omitTimings, "Suppress timing fields (determinism)");
    addClassicOptions(eval, evalOpt);
    addGridOptions(eval, evalOpt);

    // unlock-stats
    SchemeOptions statsOpt;
    bool listEntries = false;
    CLI::App* unlockStats =
        app.add_subcommand("unlock-stats", "Grid unlocking-set statistics per impostor pair");
    unlockStats->add_option("--dataset", datasetDir, "Dataset directory")->required();
    unlockStats->add_option("--draws", draws, "Randomized decoder draw count");
    unlockStats->add_flag("--list", listEntries, "Include every (t, omega) pair");
    addGridOptions(unlockStats, statsOpt);

    // attack
    CLI::App* attack = app.add_subcommand("attack", "Attack a vault record");
    attack->require_subcommand(1);
    std::uint64_t maxIterations = 100000000ull;
    std::string vaultAPath, vaultBPath;

    CLI::App* attackBf = attack->add_subcommand("bf", "Brute-force subset search");
    attackBf->add_option("--vault", vaultPath, "Vault record")->required();
    attackBf->add_option("--max-iterations", maxIterations, "Iteration budget");

    CLI::App* attackFa = attack->add_subcommand("fa", "False-accept attack from a dataset");
    attackFa->add_option("--vault", vaultPath, "Vault record")->required();
    attackFa->add_option("--dataset", datasetDir, "Query dataset directory")->required();
    attackFa->add_option("--decoder", decoder, "exhaustive | randomized");
    attackFa->add_option("--draws", draws, "Randomized decoder draw count");

    CLI::App* attackCorrelate =
        attack->add_subcommand("correlate", "Cross-match two records of one finger");
    attackCorrelate->add_option("--vault-a", vaultAPath, "First vault record")->required();
    attackCorrelate->add_option("--vault-b", vaultBPath, "Second vault record")->required();

    // train-grid
    std::vector<double> lambdas{27, 29, 31};
    std::vector<std::uint32_t> directions{4, 6, 8};
    std::vector<std::uint32_t> tMaxValues{40, 44, 48};
    std::vector<std::uint32_t> trainKValues{6, 7, 8};
    bool fullTable = false;
    CLI::App* trainGrid =
        app.add_subcommand("train-grid", "Train grid parameters on a dataset");
    trainGrid->add_option("--dataset", datasetDir, "Dataset directory")->required();
    trainGrid->add_option("--lambdas", lambdas, "Grid pitches to sweep")->delimiter(',');
    trainGrid->add_option("--directions", directions, "Direction levels to sweep")
        ->delimiter(',');
    trainGrid->add_option("--t-max-values", tMaxValues, "Feature caps to sweep")
        ->delimiter(',');
    trainGrid->add_option("--k-values", trainKValues, "Degree bounds to sweep")
        ->delimiter(',');
    trainGrid->add_flag("--full-table", fullTable, "Emit the whole score table");

    // stats
    CLI::App* stats = app.add_subcommand("stats", "Interval statistics");
    stats->require_subcommand(1);
    std::uint64_t statSuccesses = 0, statTrials = 1;
    double statLevel = 0.95;
    CLI::App* statsCi = stats->add_subcommand("ci", "Exact binomial confidence interval");
    statsCi->add_option("--successes", statSuccesses, "Observed successes")->required();
    statsCi->add_option("--trials", statTrials, "Trial count")->required();
    statsCi->add_option("--level", statLevel, "Confidence level");
    CLI::App* statsRot = stats->add_subcommand("rot", "Zero-success rule-of-three bound");
    statsRot->add_option("--trials", statTrials, "Trial count")->required();

    // tables
    int tableId = 2;
    std::string tableFormat = "json";
    CLI::App* tables = app.add_subcommand("tables", "Closed-form security tables");
    tables->add_option("--table", tableId, "Table number (2, 3, 5)")->required();
    tables->add_option("--format", tableFormat, "json | text");

    for (CLI::App* cmd : {synth, enroll, verify, eval, unlockStats, attackBf, attackFa,
                          attackCorrelate, trainGrid})
        cmd->add_option("--seed", seed, "Deterministic seed");
    for (CLI::App* cmd : {eval, attackBf})
        cmd->add_option("--cores", cores, "Worker thread count");
    CLI::Option* budgetOpt = nullptr;
    for (CLI::App* cmd : {verify, eval, attackFa, attackCorrelate})
        budgetOpt = cmd->add_option("--budget", budgetValue, "Exhaustive decoder subset budget");
    (void)budgetOpt;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    std::optional<std::uint64_t> budget;
    if (budgetValue > 0)
        budget = budgetValue;

    try {
        if (*synth)
            return runSynth(synthOpt);
        if (*enroll)
            return runEnroll(enrollOpt, templatePath, vaultPath, descriptorPath,
                             secretOutPath, seed);
        if (*verify)
            return runVerify(vaultPath, queryPath, descriptorPath, decoder, draws, budget,
                             seed);
        if (*eval)
            return runEval(datasetDir, evalOpt, evalKValues, decoder, draws, budget, seed,
                           cores, omitTimings);
        if (*unlockStats)
            return runUnlockStats(datasetDir, statsOpt.grid, draws, listEntries);
        if (*attackBf)
            return runAttackBf(vaultPath, maxIterations, seed, cores);
        if (*attackFa)
            return runAttackFa(vaultPath, datasetDir, decoder, draws, budget, seed);
        if (*attackCorrelate)
            return runAttackCorrelate(vaultAPath, vaultBPath, budget);
        if (*trainGrid)
            return runTrainGrid(datasetDir, lambdas, directions, tMaxValues, trainKValues,
                                fullTable);
        if (*statsCi) {
            json doc = intervalJson(clopperPearson({statSuccesses, statTrials}, statLevel));
            doc["pointEstimate"] = pointEstimate({statSuccesses, statTrials});
            emit(doc);
            return kExitOk;
        }
        if (*statsRot) {
            emit(intervalJson(ruleOfThree(statTrials)));
            return kExitOk;
        }
        if (*tables)
            return runTables(tableId, tableFormat);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitReject;
    }
    return kExitUsage;
}

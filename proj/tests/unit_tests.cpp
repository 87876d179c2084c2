// Fast unit tests: frozen closed-form values, module invariants and
// deterministic end-to-end flows. Heavier Monte-Carlo checks live in
// slow_tests.cpp; the release gates live in acceptance_tests.cpp.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "fpvault/attacks.hpp"
#include "fpvault/bch.hpp"
#include "fpvault/classic_vault.hpp"
#include "fpvault/combinatorics.hpp"
#include "fpvault/decode.hpp"
#include "fpvault/descriptor_vault.hpp"
#include "fpvault/errors.hpp"
#include "fpvault/eval.hpp"
#include "fpvault/field.hpp"
#include "fpvault/grid_vault.hpp"
#include "fpvault/hexgrid.hpp"
#include "fpvault/minutia.hpp"
#include "fpvault/rng.hpp"
#include "fpvault/sha1.hpp"
#include "fpvault/stats.hpp"
#include "fpvault/synth.hpp"

namespace {

using namespace fpvault;
namespace fs = std::filesystem;

FieldElement fe(std::uint32_t v)
{
    return FieldElement{static_cast<std::uint16_t>(v)};
}

// t points with the first `omega` (after sorting by abscissa) on f and the
// rest off f. Abscissae are `start`, `start+1`, ...
std::vector<VaultPoint> pointsOnPolynomial(const Polynomial& f, std::uint32_t t,
                                           std::uint32_t omega, std::uint32_t start = 0)
{
    std::vector<VaultPoint> points;
    points.reserve(t);
    for (std::uint32_t i = 0; i < t; ++i) {
        FieldElement x = fe(start + i);
        FieldElement y = f.evaluate(x);
        if (i >= omega)
            y = fieldAdd(y, fe(1)); // off the polynomial
        points.push_back({x, y});
    }
    return points;
}

fs::path freshScratchDir(const std::string& name)
{
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

MinutiaeTemplate paperScaleFinger(std::uint64_t seed)
{
    return synthesizeFinger(seed, 40, 296, 560, 25.0);
}

} // namespace

TEST_SUITE("field") {

TEST_CASE("addition is xor")
{
    CHECK(fieldAdd(fe(0x1234), fe(0x00FF)).value == (0x1234 ^ 0x00FF));
    CHECK(fieldAdd(fe(0xABCD), fe(0xABCD)).value == 0);
}

TEST_CASE("frozen products and inverses")
{
    CHECK(fieldMul(fe(3), fe(5)).value == 0xF);
    CHECK(fieldMul(fe(0x1234), fe(0x5678)).value == 0x6324);
    CHECK(fieldMul(fe(0xFFFF), fe(0xFFFF)).value == 0x733);
    CHECK(fieldInv(fe(2)).value == 0x8805);
    CHECK(fieldInv(fe(0x1234)).value == 0x2CE9);
    CHECK_THROWS_AS(fieldInv(fe(0)), std::domain_error);
}

TEST_CASE("every nonzero element has a working inverse")
{
    for (std::uint32_t v = 1; v < kFieldOrder; ++v)
        REQUIRE(fieldMul(fe(v), fieldInv(fe(v))).value == 1);
}

TEST_CASE("field axioms on random triples")
{
    Rng rng(11);
    for (int i = 0; i < 100000; ++i) {
        FieldElement a = fe(rng.below(kFieldOrder));
        FieldElement b = fe(rng.below(kFieldOrder));
        FieldElement c = fe(rng.below(kFieldOrder));
        CHECK(fieldMul(a, b) == fieldMul(b, a));
        CHECK(fieldMul(fieldMul(a, b), c) == fieldMul(a, fieldMul(b, c)));
        CHECK(fieldMul(a, fieldAdd(b, c)) == fieldAdd(fieldMul(a, b), fieldMul(a, c)));
    }
}

TEST_CASE("interpolation round trip")
{
    Rng rng(12);
    for (std::size_t k = 1; k <= 12; ++k) {
        for (int rep = 0; rep < 20; ++rep) {
            Polynomial f = Polynomial::random(k, rng);
            std::vector<VaultPoint> points;
            std::set<std::uint16_t> seen;
            while (points.size() < k) {
                FieldElement x = fe(rng.below(kFieldOrder));
                if (!seen.insert(x.value).second)
                    continue;
                points.push_back({x, f.evaluate(x)});
            }
            Polynomial g = lagrangeInterpolate(points, k);
            REQUIRE(g == f);
        }
    }
}

TEST_CASE("interpolation input validation")
{
    Polynomial f(std::vector<FieldElement>{fe(1), fe(2), fe(3)});
    std::vector<VaultPoint> dup = {{fe(5), fe(1)}, {fe(5), fe(2)}, {fe(7), fe(3)}};
    CHECK_THROWS_AS(lagrangeInterpolate(dup, 3), std::domain_error);
    std::vector<VaultPoint> two = {{fe(5), fe(1)}, {fe(6), fe(2)}};
    CHECK_THROWS_AS(lagrangeInterpolate(two, 3), std::domain_error);
}

TEST_CASE("sha1 vectors")
{
    CHECK(hexDigest(sha1(std::vector<std::uint8_t>{})) ==
          "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    std::vector<std::uint8_t> abc = {'a', 'b', 'c'};
    CHECK(hexDigest(sha1(abc)) == "a9993e364706816aba3e25717850c26c9cd0d89d");
}

TEST_CASE("polynomial commitment matches its serialization rule")
{
    // polyHash hashes k coefficients as 2-byte big-endian words, so the
    // zero polynomial with k = 9 commits to SHA-1 of 18 zero bytes.
    Polynomial zero(std::vector<FieldElement>(9));
    CHECK(hexDigest(polyHash(zero).bytes) == "a770e927c71c77a0a9ba32e12cd7eae07148f0e7");
    // Degree bound is part of the commitment: k = 8 zero polynomial differs.
    Polynomial zero8(std::vector<FieldElement>(8));
    CHECK(polyHash(zero8).bytes != polyHash(zero).bytes);
}

TEST_CASE("commitment collision-free over a large random sample")
{
    Rng rng(13);
    std::set<std::array<std::uint8_t, 20>> digests;
    std::set<std::vector<FieldElement>> inputs;
    int fresh = 0;
    for (int i = 0; i < 100000; ++i) {
        Polynomial f = Polynomial::random(9, rng);
        if (!inputs.insert(f.coefficients()).second)
            continue; // duplicate input, same digest expected
        ++fresh;
        REQUIRE(digests.insert(polyHash(f).bytes).second);
    }
    CHECK(fresh > 99000);
}

} // TEST_SUITE("field")

TEST_SUITE("combinatorics") {

TEST_CASE("binomial basics")
{
    CHECK(binomial(10, 3) == 120);
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(5, 7) == 0);
    CHECK(binomial(224, 9) == BigInt("3324848575592544"));
}

TEST_CASE("brute-force security frozen values")
{
    CHECK(bfSecurity(10, 5, 3).value == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(bfSecurity(20, 8, 3).value == doctest::Approx(20.357142857142858).epsilon(1e-12));
    CHECK(bfSecurity(224, 24, 9).value == doctest::Approx(2542897440.92).epsilon(1e-9));
    CHECK(bfSecurity(224, 24, 9).log2Value == doctest::Approx(31.243826).epsilon(1e-7));
    CHECK(bfSecurity(1452, 44, 7).log2Value == doctest::Approx(36.015060).epsilon(1e-7));
}

TEST_CASE("security times C(t,k) equals C(n,k) exactly")
{
    const std::uint64_t cases[][3] = {{218, 18, 9},  {224, 24, 9},  {224, 24, 8},
                                      {224, 24, 11}, {440, 40, 13}, {440, 40, 14},
                                      {1452, 44, 7}, {20, 8, 3}};
    for (const auto& c : cases) {
        BfSecurity s = bfSecurity(c[0], c[1], c[2]);
        CHECK(s.numerator == binomial(c[0], c[2]));
        CHECK(s.denominator == binomial(c[1], c[2]));
        // The rational is exactly C(n,k)/C(t,k): cross-multiplied identity.
        CHECK(s.numerator * binomial(c[1], c[2]) == s.denominator * binomial(c[0], c[2]));
    }
}

TEST_CASE("expected iterations for even odds")
{
    CHECK(expectedBfIterations(20, 8, 3) ==
          doctest::Approx(13.761013202379695).epsilon(1e-12));
    // Degenerate case: every draw wins, one iteration suffices.
    CHECK(expectedBfIterations(9, 9, 9) == doctest::Approx(1.0));
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS(bfSecurity(10, 12, 3), std::domain_error);
    CHECK_THROWS_AS(bfSecurity(10, 5, 0), std::domain_error);
    CHECK_THROWS_AS(bfSecurity(10, 5, 6), std::domain_error);
}

} // TEST_SUITE("combinatorics")

TEST_SUITE("minutiae") {

TEST_CASE("angular distance is the short way around")
{
    CHECK(angularDistance(350.0, 10.0) == doctest::Approx(20.0));
    CHECK(angularDistance(0.0, 180.0) == doctest::Approx(180.0));
    CHECK(angularDistance(90.0, 90.0) == doctest::Approx(0.0));
}

TEST_CASE("dissimilarity combines position and direction")
{
    Minutia m1{0.0, 0.0, 0.0, 1.0};
    Minutia m2{3.0, 4.0, 90.0, 1.0};
    CHECK(minutiaeDissimilarity(m1, m2) == doctest::Approx(5.0 + 0.2 * 90.0));
}

TEST_CASE("well-separated selection invariants")
{
    MinutiaeTemplate tmpl = paperScaleFinger(31);
    std::vector<std::size_t> sel = selectWellSeparatedIndices(tmpl, 18, 24, 25.0);
    REQUIRE(sel.size() <= 24);
    REQUIRE(sel.size() >= 18);
    for (std::size_t i = 0; i < sel.size(); ++i)
        for (std::size_t j = i + 1; j < sel.size(); ++j)
            CHECK(minutiaeDissimilarity(tmpl.minutiae[sel[i]], tmpl.minutiae[sel[j]]) > 25.0);
    // Quality-first walk: kept indices arrive in ranking order.
    CHECK(std::is_sorted(sel.begin(), sel.end()));
    // The best-quality minutia is always kept.
    CHECK(sel.front() == 0);
}

TEST_CASE("selection failure on sparse templates")
{
    MinutiaeTemplate tiny;
    tiny.width = 296;
    tiny.height = 560;
    tiny.minutiae = {{10.0, 10.0, 0.0, 0.9}, {12.0, 11.0, 5.0, 0.8}};
    CHECK_THROWS_AS(selectWellSeparatedIndices(tiny, 18, 24, 25.0), FailureToCapture);
}

TEST_CASE("rigid motions preserve dissimilarity")
{
    Rng rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        Minutia m1{rng.below(296) * 1.0, rng.below(560) * 1.0, rng.below(360) * 1.0, 0.5};
        Minutia m2{rng.below(296) * 1.0, rng.below(560) * 1.0, rng.below(360) * 1.0, 0.5};
        RigidTransform t{rng.below(41) - 20.0, rng.below(41) - 20.0, rng.below(61) - 30.0,
                         148.0, 280.0};
        double before = minutiaeDissimilarity(m1, m2);
        double after = minutiaeDissimilarity(applyTransform(m1, t), applyTransform(m2, t));
        CHECK(after == doctest::Approx(before).epsilon(1e-9));
    }
}

TEST_CASE("composition and inversion act like the composed maps")
{
    Rng rng(18);
    for (int rep = 0; rep < 50; ++rep) {
        RigidTransform t1{rng.below(31) - 15.0, rng.below(31) - 15.0, rng.below(41) - 20.0,
                          148.0, 280.0};
        RigidTransform t2{rng.below(31) - 15.0, rng.below(31) - 15.0, rng.below(41) - 20.0,
                          100.0, 50.0};
        Minutia m{rng.below(296) * 1.0, rng.below(560) * 1.0, rng.below(360) * 1.0, 0.7};
        Minutia viaCompose = applyTransform(m, composeTransforms(t2, t1));
        Minutia stepwise = applyTransform(applyTransform(m, t1), t2);
        CHECK(viaCompose.a == doctest::Approx(stepwise.a).epsilon(1e-9));
        CHECK(viaCompose.b == doctest::Approx(stepwise.b).epsilon(1e-9));
        CHECK(angularDistance(viaCompose.theta, stepwise.theta) < 1e-9);

        Minutia back = applyTransform(applyTransform(m, t1), invertTransform(t1));
        CHECK(back.a == doctest::Approx(m.a).epsilon(1e-9));
        CHECK(back.b == doctest::Approx(m.b).epsilon(1e-9));
        CHECK(angularDistance(back.theta, m.theta) < 1e-9);
    }
}

TEST_CASE("template files round trip and validate")
{
    fs::path dir = freshScratchDir("fpvault_unit_templates");
    MinutiaeTemplate tmpl = paperScaleFinger(19);
    fs::path file = dir / "t.txt";
    writeTemplate(file.string(), tmpl);
    MinutiaeTemplate back = readTemplate(file.string());
    REQUIRE(back.minutiae.size() == tmpl.minutiae.size());
    CHECK(back.width == tmpl.width);
    CHECK(back.height == tmpl.height);
    // Loader sorts by quality, best first.
    for (std::size_t i = 1; i < back.minutiae.size(); ++i)
        CHECK(back.minutiae[i - 1].quality >= back.minutiae[i].quality);

    std::ofstream bad(dir / "bad.txt");
    bad << "296 560\n"
        << "9999 10 0 0.5\n"; // position outside the region
    bad.close();
    CHECK_THROWS_AS(readTemplate((dir / "bad.txt").string()), ParseError);
}

} // TEST_SUITE("minutiae")

TEST_SUITE("synth") {

TEST_CASE("master generation honors its contract")
{
    MinutiaeTemplate tmpl = paperScaleFinger(23);
    REQUIRE(tmpl.minutiae.size() == 40);
    CHECK(tmpl.width == 296);
    CHECK(tmpl.height == 560);
    for (const Minutia& m : tmpl.minutiae) {
        CHECK(m.a >= 0.0);
        CHECK(m.a <= 296.0);
        CHECK(m.b >= 0.0);
        CHECK(m.b <= 560.0);
        CHECK(m.theta >= 0.0);
        CHECK(m.theta < 360.0);
        CHECK(m.quality >= 0.5);
        CHECK(m.quality <= 1.0);
    }
    for (std::size_t i = 0; i < tmpl.minutiae.size(); ++i)
        for (std::size_t j = i + 1; j < tmpl.minutiae.size(); ++j)
            CHECK(minutiaeDissimilarity(tmpl.minutiae[i], tmpl.minutiae[j]) > 25.0);

    MinutiaeTemplate again = paperScaleFinger(23);
    REQUIRE(again.minutiae.size() == tmpl.minutiae.size());
    for (std::size_t i = 0; i < tmpl.minutiae.size(); ++i) {
        CHECK(again.minutiae[i].a == tmpl.minutiae[i].a);
        CHECK(again.minutiae[i].b == tmpl.minutiae[i].b);
        CHECK(again.minutiae[i].theta == tmpl.minutiae[i].theta);
    }
}

TEST_CASE("impossible density is rejected")
{
    CHECK_THROWS_AS(synthesizeFinger(1, 10000, 296, 560, 25.0), GenerationError);
}

TEST_CASE("zero-noise impression reproduces the master")
{
    MinutiaeTemplate master = paperScaleFinger(29);
    SynthesizedImpression imp =
        synthesizeImpression(master, 5, 0.0, 0.0, 0.0, 0, RigidTransform::identity());
    REQUIRE(imp.tmpl.minutiae.size() == master.minutiae.size());
    for (std::size_t i = 0; i < imp.tmpl.minutiae.size(); ++i) {
        REQUIRE(imp.sourceIndex[i] >= 0);
        const Minutia& src = master.minutiae[static_cast<std::size_t>(imp.sourceIndex[i])];
        CHECK(imp.tmpl.minutiae[i].a == src.a);
        CHECK(imp.tmpl.minutiae[i].b == src.b);
        CHECK(imp.tmpl.minutiae[i].theta == src.theta);
        CHECK(imp.tmpl.minutiae[i].quality == src.quality);
    }
}

TEST_CASE("impression noise keeps most minutiae near their source")
{
    std::size_t near = 0, survived = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        MinutiaeTemplate master = paperScaleFinger(seed);
        SynthesizedImpression imp = synthesizeImpression(master, seed + 1000, 4.0, 8.0, 0.2,
                                                         0, RigidTransform::identity());
        for (std::size_t i = 0; i < imp.tmpl.minutiae.size(); ++i) {
            if (imp.sourceIndex[i] < 0)
                continue;
            ++survived;
            const Minutia& src =
                master.minutiae[static_cast<std::size_t>(imp.sourceIndex[i])];
            if (minutiaeDissimilarity(imp.tmpl.minutiae[i], src) <= 25.0)
                ++near;
        }
    }
    REQUIRE(survived > 0);
    CHECK(static_cast<double>(near) / static_cast<double>(survived) >= 0.6);
}

TEST_CASE("spurious minutiae are labeled as such")
{
    MinutiaeTemplate master = paperScaleFinger(37);
    SynthesizedImpression imp =
        synthesizeImpression(master, 6, 0.0, 0.0, 0.0, 7, RigidTransform::identity());
    std::size_t spurious = 0;
    for (int s : imp.sourceIndex)
        spurious += s < 0 ? 1 : 0;
    CHECK(spurious == 7);
    CHECK(imp.tmpl.minutiae.size() == master.minutiae.size() + 7);
}

} // TEST_SUITE("synth")

TEST_SUITE("classic vault") {

TEST_CASE("enrollment invariants")
{
    Rng rng(41);
    MinutiaeTemplate tmpl = paperScaleFinger(41);
    Polynomial f = Polynomial::random(9, rng);
    ClassicEnrollment e = enrollClassic(tmpl, {}, f, 97);
    const ClassicVault& v = e.vault;

    REQUIRE(v.points.size() == 224);
    REQUIRE(v.vaultMinutiae.size() == 224);
    REQUIRE(e.genuineVaultIndices.size() == 24);
    CHECK(v.digest == polyHash(f));

    // Abscissae encode the position in the lexicographically sorted list.
    for (std::size_t i = 0; i < v.points.size(); ++i)
        CHECK(v.points[i].x.value == i);
    for (std::size_t i = 1; i < v.vaultMinutiae.size(); ++i) {
        const Minutia& p = v.vaultMinutiae[i - 1];
        const Minutia& q = v.vaultMinutiae[i];
        CHECK(std::tie(p.a, p.b, p.theta) < std::tie(q.a, q.b, q.theta));
    }

    // Genuine points lie on f, chaff points do not.
    std::set<std::size_t> genuine(e.genuineVaultIndices.begin(),
                                  e.genuineVaultIndices.end());
    for (std::size_t i = 0; i < v.points.size(); ++i) {
        if (genuine.count(i))
            CHECK(v.points[i].y == f.evaluate(v.points[i].x));
        else
            CHECK(v.points[i].y != f.evaluate(v.points[i].x));
    }

    // Everything in the vault is pairwise well separated.
    for (std::size_t i = 0; i < v.vaultMinutiae.size(); ++i)
        for (std::size_t j = i + 1; j < v.vaultMinutiae.size(); ++j)
            CHECK(minutiaeDissimilarity(v.vaultMinutiae[i], v.vaultMinutiae[j]) > 25.0);

    // Ground truth maps vault slots back to template minutiae (quantized to
    // 1/100 pixel and 1/100 degree).
    CHECK(std::is_sorted(e.genuineVaultIndices.begin(), e.genuineVaultIndices.end()));
    REQUIRE(e.genuineTemplateIndices.size() == e.genuineVaultIndices.size());
    for (std::size_t i = 0; i < e.genuineVaultIndices.size(); ++i) {
        const Minutia& vm = v.vaultMinutiae[e.genuineVaultIndices[i]];
        const Minutia& tm = tmpl.minutiae[e.genuineTemplateIndices[i]];
        CHECK(std::abs(vm.a - tm.a) <= 0.0051);
        CHECK(std::abs(vm.b - tm.b) <= 0.0051);
        CHECK(angularDistance(vm.theta, tm.theta) <= 0.0051);
        CHECK(vm.a == doctest::Approx(std::round(tm.a * 100.0) / 100.0));
        CHECK(vm.b == doctest::Approx(std::round(tm.b * 100.0) / 100.0));
    }
}

TEST_CASE("enrollment failure modes")
{
    Rng rng(43);
    Polynomial f = Polynomial::random(9, rng);
    MinutiaeTemplate sparse;
    sparse.width = 296;
    sparse.height = 560;
    for (int i = 0; i < 5; ++i)
        sparse.minutiae.push_back({30.0 * i + 10.0, 40.0, 0.0, 0.9});
    CHECK_THROWS_AS(enrollClassic(sparse, {}, f, 1), FailureToCapture);

    // More vault points than the region can hold at the separation gate: the
    // default 224 points cannot be packed into a 100x100 region.
    MinutiaeTemplate cramped = synthesizeFinger(43, 20, 100, 100, 25.0);
    CHECK_THROWS_AS(enrollClassic(cramped, {}, f, 1), ChaffPlacementFailure);
}

TEST_CASE("self query unlocks with the first subset")
{
    Rng rng(47);
    MinutiaeTemplate tmpl = paperScaleFinger(47);
    Polynomial f = Polynomial::random(9, rng);
    ClassicEnrollment e = enrollClassic(tmpl, {}, f, 3);
    DecodeOutcome out = unlockClassic(e.vault, tmpl);
    REQUIRE(out.success());
    CHECK(out.subsetsTried == 1);
    CHECK(*out.secret == f);
}

TEST_CASE("unlocking sets stay genuine-rich under noise")
{
    std::size_t good = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(seed * 7 + 1);
        MinutiaeTemplate master = paperScaleFinger(seed + 500);
        Polynomial f = Polynomial::random(9, rng);
        ClassicEnrollment e = enrollClassic(master, {}, f, seed);
        SynthesizedImpression query = synthesizeImpression(
            master, seed + 2000, 4.0, 8.0, 0.2, 0, RigidTransform::identity());
        UnlockingSet u = buildUnlockingSet(e.vault, query.tmpl, &e.genuineVaultIndices);
        REQUIRE(u.genuineCount.has_value());
        if (*u.genuineCount >= 9)
            ++good;
    }
    CHECK(good >= 90);
}

TEST_CASE("unlocking set ground truth is only present when requested")
{
    Rng rng(53);
    MinutiaeTemplate tmpl = paperScaleFinger(53);
    Polynomial f = Polynomial::random(9, rng);
    ClassicEnrollment e = enrollClassic(tmpl, {}, f, 5);
    CHECK_FALSE(buildUnlockingSet(e.vault, tmpl).genuineCount.has_value());
    UnlockingSet u = buildUnlockingSet(e.vault, tmpl, &e.genuineVaultIndices);
    REQUIRE(u.genuineCount.has_value());
    CHECK(*u.genuineCount == 24);
    // Entries reference real vault slots and carry their points.
    for (const UnlockingEntry& entry : u.entries) {
        REQUIRE(entry.vaultIndex < e.vault.points.size());
        CHECK(entry.point == e.vault.points[entry.vaultIndex]);
    }
}

TEST_CASE("exhaustive decoder on a mixed unlocking set")
{
    Rng rng(59);
    Polynomial f = Polynomial::random(9, rng);
    // 12 genuine among t = 20: recoverable.
    std::vector<VaultPoint> points = pointsOnPolynomial(f, 20, 12);
    DecodeOutcome out = decodeExhaustive(points, 9, polyHash(f));
    REQUIRE(out.success());
    CHECK(*out.secret == f);
    CHECK(out.failure == DecodeFailure::None);
    CHECK(out.subsetsTried >= 1);
    CHECK(out.subsetsTried <= binomial(20, 9).convert_to<std::uint64_t>());
}

TEST_CASE("exhaustive decoder failure taxonomy")
{
    Rng rng(61);
    Polynomial f = Polynomial::random(9, rng);

    // Budget runs out before any genuine subset: genuine points get the
    // highest abscissae so early lexicographic subsets are all mixed.
    std::vector<VaultPoint> hard = pointsOnPolynomial(f, 8, 0);
    std::vector<VaultPoint> genuine = pointsOnPolynomial(f, 12, 12, 100);
    hard.insert(hard.end(), genuine.begin(), genuine.end());
    DecodeOutcome budget = decodeExhaustive(hard, 9, polyHash(f), 10);
    CHECK_FALSE(budget.success());
    CHECK(budget.failure == DecodeFailure::BudgetExhausted);
    CHECK(budget.subsetsTried == 10);

    // All subsets tried, none matches: wrong digest.
    std::vector<VaultPoint> chaff = pointsOnPolynomial(f, 10, 0);
    DecodeOutcome exhausted = decodeExhaustive(chaff, 9, polyHash(f));
    CHECK_FALSE(exhausted.success());
    CHECK(exhausted.failure == DecodeFailure::SearchExhausted);
    CHECK(exhausted.subsetsTried == binomial(10, 9).convert_to<std::uint64_t>());

    // Not enough points to try anything.
    std::vector<VaultPoint> few = pointsOnPolynomial(f, 8, 8);
    DecodeOutcome small = decodeExhaustive(few, 9, polyHash(f));
    CHECK_FALSE(small.success());
    CHECK(small.failure == DecodeFailure::TooFewPoints);
    CHECK(small.subsetsTried == 0);
}

TEST_CASE("randomized decoder determinism and draw accounting")
{
    Rng rng(67);
    Polynomial f = Polynomial::random(9, rng);
    std::vector<VaultPoint> points = pointsOnPolynomial(f, 20, 12);

    DecodeOutcome a = randomizedDecode(points, 9, polyHash(f), 5000, 1234);
    DecodeOutcome b = randomizedDecode(points, 9, polyHash(f), 5000, 1234);
    CHECK(a.success() == b.success());
    CHECK(a.subsetsTried == b.subsetsTried);
    if (a.success())
        CHECK(*a.secret == *b.secret);

    // omega < k can never succeed and consumes every draw.
    std::vector<VaultPoint> hopeless = pointsOnPolynomial(f, 20, 5);
    DecodeOutcome never = randomizedDecode(hopeless, 9, polyHash(f), 300, 99);
    CHECK_FALSE(never.success());
    CHECK(never.subsetsTried == 300);
}

TEST_CASE("serialization round trips byte for byte")
{
    Rng rng(71);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        MinutiaeTemplate tmpl = paperScaleFinger(seed + 300);
        Polynomial f = Polynomial::random(9, rng);
        ClassicEnrollment e = enrollClassic(tmpl, {}, f, seed);
        std::vector<std::uint8_t> blob = serializeClassicVault(e.vault);
        ClassicVault back = deserializeClassicVault(blob);
        CHECK(serializeClassicVault(back) == blob);
        CHECK(back.digest == e.vault.digest);
        CHECK(back.points == e.vault.points);
        REQUIRE(back.vaultMinutiae.size() == e.vault.vaultMinutiae.size());
        for (std::size_t i = 0; i < back.vaultMinutiae.size(); ++i) {
            CHECK(back.vaultMinutiae[i].a == e.vault.vaultMinutiae[i].a);
            CHECK(back.vaultMinutiae[i].b == e.vault.vaultMinutiae[i].b);
            CHECK(back.vaultMinutiae[i].theta == e.vault.vaultMinutiae[i].theta);
        }
    }
}

TEST_CASE("malformed blobs are rejected")
{
    Rng rng(73);
    MinutiaeTemplate tmpl = paperScaleFinger(301);
    Polynomial f = Polynomial::random(9, rng);
    ClassicEnrollment e = enrollClassic(tmpl, {}, f, 2);
    std::vector<std::uint8_t> blob = serializeClassicVault(e.vault);

    std::vector<std::uint8_t> truncated(blob.begin(), blob.begin() + blob.size() / 2);
    CHECK_THROWS_AS(deserializeClassicVault(truncated), ParseError);

    std::vector<std::uint8_t> badMagic = blob;
    badMagic[0] ^= 0xFF;
    CHECK_THROWS_AS(deserializeClassicVault(badMagic), ParseError);
}

TEST_CASE("chaff positions are uniform over the interior")
{
    // Pool chaff from many enrollments and chi-square a coarse interior
    // histogram (margin clear of edge effects).
    const double margin = 50.0;
    const int bins = 4;
    std::vector<std::uint64_t> counts(bins * bins, 0);
    std::uint64_t total = 0;
    Rng rng(79);
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        MinutiaeTemplate tmpl = paperScaleFinger(seed + 700);
        Polynomial f = Polynomial::random(9, rng);
        ClassicEnrollment e = enrollClassic(tmpl, {}, f, seed);
        std::set<std::size_t> genuine(e.genuineVaultIndices.begin(),
                                      e.genuineVaultIndices.end());
        const double w = 296.0 - 2 * margin, h = 560.0 - 2 * margin;
        for (std::size_t i = 0; i < e.vault.vaultMinutiae.size(); ++i) {
            if (genuine.count(i))
                continue;
            const Minutia& m = e.vault.vaultMinutiae[i];
            if (m.a < margin || m.a >= 296.0 - margin || m.b < margin ||
                m.b >= 560.0 - margin)
                continue;
            int bx = std::min(bins - 1, static_cast<int>((m.a - margin) / (w / bins)));
            int by = std::min(bins - 1, static_cast<int>((m.b - margin) / (h / bins)));
            ++counts[by * bins + bx];
            ++total;
        }
    }
    REQUIRE(total > 4000);
    const double expected = static_cast<double>(total) / (bins * bins);
    double chi2 = 0.0;
    for (std::uint64_t c : counts) {
        const double d = c - expected;
        chi2 += d * d / expected;
    }
    CHECK(chi2 < 30.578); // chi-square critical value, 15 dof, alpha = 0.01
}

} // TEST_SUITE("classic vault")

TEST_SUITE("bch") {

TEST_CASE("standard instances have the advertised shape")
{
    const BchCode& c511 = BchCode::code511_19();
    CHECK(c511.length() == 511);
    CHECK(c511.dimension() == 19);
    CHECK(c511.correctable() == 119);
    CHECK(c511.generator().size() == 511 - 19 + 1);

    const BchCode& c31 = BchCode::code31_6();
    CHECK(c31.length() == 31);
    CHECK(c31.dimension() == 6);
    CHECK(c31.correctable() == 7);
    CHECK(c31.generator().size() == 31 - 6 + 1);

    const BchCode& c15 = BchCode::code15_5();
    CHECK(c15.length() == 15);
    CHECK(c15.dimension() == 5);
    CHECK(c15.correctable() == 3);
    REQUIRE(c15.generator().size() == 11);
    std::uint32_t gen = 0;
    for (std::size_t i = 0; i < c15.generator().size(); ++i)
        gen |= static_cast<std::uint32_t>(c15.generator()[i]) << i;
    CHECK(gen == 0x537);
}

TEST_CASE("encoding is systematic")
{
    const BchCode& code = BchCode::code15_5();
    std::vector<std::uint8_t> word = code.encode(0b10110);
    REQUIRE(word.size() == 15);
    for (std::uint32_t i = 0; i < 5; ++i)
        CHECK(word[10 + i] == ((0b10110 >> i) & 1));
    CHECK(code.encode(0) == std::vector<std::uint8_t>(15, 0));
}

TEST_CASE("short code: every message round trips under full error load")
{
    const BchCode& code = BchCode::code15_5();
    Rng rng(83);
    for (std::uint32_t msg = 0; msg < 32; ++msg) {
        std::vector<std::uint8_t> word = code.encode(msg);
        REQUIRE(code.decode(word) == msg);

        std::vector<std::uint8_t> noisy = word;
        std::set<std::uint32_t> flips;
        while (flips.size() < 3)
            flips.insert(rng.below(15));
        for (std::uint32_t p : flips)
            noisy[p] ^= 1;
        REQUIRE(code.decode(noisy) == msg);

        // One flip past the guarantee must never pretend to be the original.
        std::vector<std::uint8_t> over = word;
        std::set<std::uint32_t> four;
        while (four.size() < 4)
            four.insert(rng.below(15));
        for (std::uint32_t p : four)
            over[p] ^= 1;
        std::optional<std::uint32_t> res = code.decode(over);
        CHECK(res != std::optional<std::uint32_t>(msg));
    }
}

TEST_CASE("short code: exhaustive minimum distance")
{
    const BchCode& code = BchCode::code15_5();
    std::uint32_t minWeight = 15;
    for (std::uint32_t msg = 1; msg < 32; ++msg) {
        std::vector<std::uint8_t> word = code.encode(msg);
        std::uint32_t weight = 0;
        for (std::uint8_t bit : word)
            weight += bit;
        minWeight = std::min(minWeight, weight);
    }
    CHECK(minWeight == 7); // supports the 3-error guarantee
}

TEST_CASE("long code corrects its full error budget")
{
    const BchCode& code = BchCode::code511_19();
    Rng rng(89);
    for (int rep = 0; rep < 5; ++rep) {
        std::uint32_t msg = rng.below(1u << 19);
        std::vector<std::uint8_t> word = code.encode(msg);
        std::set<std::uint32_t> flips;
        while (flips.size() < 119)
            flips.insert(rng.below(511));
        for (std::uint32_t p : flips)
            word[p] ^= 1;
        REQUIRE(code.decode(word) == msg);
    }
}

TEST_CASE("intermediate code corrects its budget")
{
    const BchCode& code = BchCode::code31_6();
    Rng rng(97);
    for (int rep = 0; rep < 20; ++rep) {
        std::uint32_t msg = rng.below(1u << 6);
        std::vector<std::uint8_t> word = code.encode(msg);
        std::set<std::uint32_t> flips;
        while (flips.size() < 7)
            flips.insert(rng.below(31));
        for (std::uint32_t p : flips)
            word[p] ^= 1;
        REQUIRE(code.decode(word) == msg);
    }
}

} // TEST_SUITE("bch")

TEST_SUITE("descriptor vault") {

TEST_CASE("hardening layout and genuine unmasking")
{
    Rng rng(101);
    MinutiaeTemplate tmpl = paperScaleFinger(101);
    Polynomial f = Polynomial::random(9, rng);
    ClassicEnrollment e = enrollClassic(tmpl, {}, f, 11);
    const BchCode& code = BchCode::code511_19();

    std::vector<Descriptor> all;
    for (std::size_t i = 0; i < tmpl.minutiae.size(); ++i)
        all.push_back(randomDescriptor(511, rng));
    std::vector<Descriptor> genuineDescs;
    for (std::size_t t : e.genuineTemplateIndices)
        genuineDescs.push_back(all[t]);

    DescriptorVault hv = hardenVault(e, genuineDescs, code, 13);
    REQUIRE(hv.entries.size() == e.vault.points.size());
    CHECK(hv.code.length == 511);
    CHECK(hv.code.dimension == 19);
    CHECK(hv.digest == e.vault.digest);
    for (const MaskedEntry& entry : hv.entries)
        CHECK(entry.masked.size() == 511);

    // A genuine entry opens under its own descriptor and yields the ordinate.
    for (std::size_t gi = 0; gi < e.genuineVaultIndices.size(); ++gi) {
        std::size_t vi = e.genuineVaultIndices[gi];
        std::vector<std::uint8_t> unmasked = hv.entries[vi].masked;
        for (std::size_t b = 0; b < unmasked.size(); ++b)
            unmasked[b] ^= genuineDescs[gi].bits[b];
        std::optional<std::uint32_t> msg = code.decode(unmasked);
        REQUIRE(msg.has_value());
        CHECK(*msg == e.vault.points[vi].y.value);
    }
}

TEST_CASE("hardened unlock tolerates descriptor noise and repels strangers")
{
    Rng rng(103);
    MinutiaeTemplate tmpl = paperScaleFinger(103);
    Polynomial f = Polynomial::random(9, rng);
    ClassicEnrollment e = enrollClassic(tmpl, {}, f, 17);
    const BchCode& code = BchCode::code511_19();

    std::vector<Descriptor> all;
    for (std::size_t i = 0; i < tmpl.minutiae.size(); ++i)
        all.push_back(randomDescriptor(511, rng));
    std::vector<Descriptor> genuineDescs;
    for (std::size_t t : e.genuineTemplateIndices)
        genuineDescs.push_back(all[t]);
    DescriptorVault hv = hardenVault(e, genuineDescs, code, 19);

    DecodeOutcome self = unlockHardened(hv, tmpl, all);
    REQUIRE(self.success());
    CHECK(*self.secret == f);

    // 15% bit flips stay well inside the 119-error budget.
    std::vector<Descriptor> noisy;
    for (const Descriptor& d : all)
        noisy.push_back(perturbDescriptor(d, 0.15, rng));
    DecodeOutcome tolerant = unlockHardened(hv, tmpl, noisy);
    REQUIRE(tolerant.success());
    CHECK(*tolerant.secret == f);

    // Unrelated descriptors decode almost nothing: the minutiae still match,
    // the commitments do not open.
    std::vector<Descriptor> stranger;
    for (std::size_t i = 0; i < tmpl.minutiae.size(); ++i)
        stranger.push_back(randomDescriptor(511, rng));
    DecodeOutcome repelled = unlockHardened(hv, tmpl, stranger);
    CHECK_FALSE(repelled.success());
}

TEST_CASE("small codes bind only the ordinate low bits")
{
    Rng rng(107);
    MinutiaeTemplate tmpl = paperScaleFinger(107);
    Polynomial f = Polynomial::random(9, rng);
    ClassicEnrollment e = enrollClassic(tmpl, {}, f, 23);
    const BchCode& code = BchCode::code15_5();

    std::vector<Descriptor> genuineDescs;
    for (std::size_t i = 0; i < e.genuineVaultIndices.size(); ++i)
        genuineDescs.push_back(randomDescriptor(15, rng));
    DescriptorVault hv = hardenVault(e, genuineDescs, code, 29);

    // Entries commit the ordinate's low 5 bits.
    for (std::size_t gi = 0; gi < e.genuineVaultIndices.size(); ++gi) {
        std::size_t vi = e.genuineVaultIndices[gi];
        std::vector<std::uint8_t> unmasked = hv.entries[vi].masked;
        for (std::size_t b = 0; b < unmasked.size(); ++b)
            unmasked[b] ^= genuineDescs[gi].bits[b];
        std::optional<std::uint32_t> msg = code.decode(unmasked);
        REQUIRE(msg.has_value());
        CHECK(*msg == (e.vault.points[vi].y.value & 0x1F));
    }

    // Ordinate reconstruction is impossible below 16 committed bits.
    std::vector<Descriptor> queryDescs;
    for (std::size_t i = 0; i < tmpl.minutiae.size(); ++i)
        queryDescs.push_back(randomDescriptor(15, rng));
    CHECK_THROWS_AS(unlockHardened(hv, tmpl, queryDescs), std::domain_error);
}

TEST_CASE("sphere packing densities")
{
    CHECK(spherePackingDensity({511, 19, 119}) ==
          doctest::Approx(1.3008758261468187e-29).epsilon(1e-10));
    CHECK(spherePackingDensity({31, 6, 7}) == 0.1064605712890625);
    CHECK(spherePackingDensity({15, 5, 3}) == 0.5625);
}

TEST_CASE("hardened security composes the per-entry multiplier")
{
    const double rho = spherePackingDensity({511, 19, 119});
    HardenedSecurity hs = hardenedBruteForceSecurity(224, 24, 9, 4.27, rho);
    const double S = 1.0 + 3.27 * rho;
    const double expected = bfSecurity(224, 24, 9).log2Value + 9.0 * std::log2(S);
    CHECK(hs.log2Value == doctest::Approx(expected).epsilon(1e-12));
    // The code-spec overload agrees with the direct-rho overload.
    HardenedSecurity viaSpec = hardenedBruteForceSecurity(224, 24, 9, 4.27, {511, 19, 119});
    CHECK(viaSpec.log2Value == doctest::Approx(hs.log2Value).epsilon(1e-12));
}

TEST_CASE("decoupling report arithmetic")
{
    Rng rng(109);
    MinutiaeTemplate tmpl = paperScaleFinger(109);
    Polynomial f = Polynomial::random(9, rng);
    ClassicEnrollment e = enrollClassic(tmpl, {}, f, 31);
    const BchCode& code = BchCode::code15_5();
    std::vector<Descriptor> genuineDescs;
    for (std::size_t i = 0; i < e.genuineVaultIndices.size(); ++i)
        genuineDescs.push_back(randomDescriptor(15, rng));
    DescriptorVault hv = hardenVault(e, genuineDescs, code, 37);

    std::vector<Descriptor> pool;
    pool.push_back(genuineDescs[0]);
    for (int i = 0; i < 19; ++i)
        pool.push_back(randomDescriptor(15, rng));

    DecouplingReport rep = decoupleOrdinates(hv, pool, 2.0);
    REQUIRE(rep.candidateCounts.size() == hv.entries.size());
    CHECK(rep.rho == 0.5625);
    CHECK(rep.analyticCandidates == doctest::Approx(1.0 + 19.0 * 0.5625));
    const double sPrime = (2.0 - 1.0) * 0.5625;
    CHECK(rep.attackSuccessProbability ==
          doctest::Approx(1.0 - std::pow(1.0 - sPrime, 224.0)));
    // The true descriptor opens its own entry.
    CHECK(rep.candidateCounts[e.genuineVaultIndices[0]] >= 1);
    double mean = 0.0;
    for (std::size_t c : rep.candidateCounts)
        mean += static_cast<double>(c);
    mean /= static_cast<double>(rep.candidateCounts.size());
    CHECK(rep.meanCandidates == doctest::Approx(mean));
}

TEST_CASE("descriptor files round trip")
{
    fs::path dir = freshScratchDir("fpvault_unit_descs");
    Rng rng(113);
    std::vector<Descriptor> descs;
    for (int i = 0; i < 10; ++i)
        descs.push_back(randomDescriptor(511, rng));
    fs::path file = dir / "d.txt";
    writeDescriptors(file.string(), descs);
    std::vector<Descriptor> back = readDescriptors(file.string(), 511);
    CHECK(back == descs);
    CHECK_THROWS_AS(readDescriptors(file.string(), 31), ParseError);
}

TEST_CASE("hardened vault serialization round trips")
{
    Rng rng(127);
    MinutiaeTemplate tmpl = paperScaleFinger(127);
    Polynomial f = Polynomial::random(9, rng);
    ClassicEnrollment e = enrollClassic(tmpl, {}, f, 41);
    std::vector<Descriptor> genuineDescs;
    for (std::size_t i = 0; i < e.genuineVaultIndices.size(); ++i)
        genuineDescs.push_back(randomDescriptor(511, rng));
    DescriptorVault hv = hardenVault(e, genuineDescs, BchCode::code511_19(), 43);

    std::vector<std::uint8_t> blob = serializeDescriptorVault(hv);
    DescriptorVault back = deserializeDescriptorVault(blob);
    CHECK(serializeDescriptorVault(back) == blob);
    CHECK(back.digest == hv.digest);
    REQUIRE(back.entries.size() == hv.entries.size());
    for (std::size_t i = 0; i < back.entries.size(); ++i) {
        CHECK(back.entries[i].x == hv.entries[i].x);
        CHECK(back.entries[i].masked == hv.entries[i].masked);
    }

    std::vector<std::uint8_t> truncated(blob.begin(), blob.begin() + 40);
    CHECK_THROWS_AS(deserializeDescriptorVault(truncated), ParseError);
}

} // TEST_SUITE("descriptor vault")

TEST_SUITE("hex grid") {

TEST_CASE("reference grid size and spacing")
{
    HexGrid grid = buildHexGrid(29.0, 296, 560);
    REQUIRE(grid.size() == 242);
    double minDist = 1e18;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            double dx = grid.points[i].x - grid.points[j].x;
            double dy = grid.points[i].y - grid.points[j].y;
            minDist = std::min(minDist, std::hypot(dx, dy));
        }
    CHECK(minDist == doctest::Approx(29.0).epsilon(1e-9));
    // Row-major layout: y never decreases.
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid.points[i].y >= grid.points[i - 1].y - 1e-12);
}

TEST_CASE("nearest index and label round trips")
{
    HexGrid grid = buildHexGrid(29.0, 296, 560);
    const std::uint32_t s = 6;
    for (std::uint32_t label = 0; label < grid.size() * s; ++label) {
        Minutia m = featureMinutia(grid, s, label);
        CHECK(quantizeMinutia(grid, s, m) == label);
    }
    // Ties go to the lowest index; interior points to themselves.
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(nearestGridIndex(grid, grid.points[i].x, grid.points[i].y) == i);
}

TEST_CASE("feature extraction caps and sorts")
{
    HexGrid grid = buildHexGrid(29.0, 296, 560);
    MinutiaeTemplate tmpl = paperScaleFinger(131);
    FeatureSet fs = extractFeatureSet(tmpl, grid, 6, 44);
    CHECK(fs.size() <= 44);
    CHECK(std::is_sorted(fs.labels.begin(), fs.labels.end()));
    CHECK(std::adjacent_find(fs.labels.begin(), fs.labels.end()) == fs.labels.end());
    FeatureSet capped = extractFeatureSet(tmpl, grid, 6, 10);
    CHECK(capped.size() == 10);
}

} // TEST_SUITE("hex grid")

TEST_SUITE("grid vault") {

TEST_CASE("enrollment fills the fixed universe")
{
    Rng rng(137);
    MinutiaeTemplate tmpl = paperScaleFinger(137);
    Polynomial f = Polynomial::random(7, rng);
    GridEnrollment e = gridEnroll(tmpl, {}, f, 47);
    REQUIRE(e.vault.ordinates.size() == 1452);
    CHECK(e.vault.digest == polyHash(f));
    std::set<std::uint32_t> features(e.features.labels.begin(), e.features.labels.end());
    for (std::size_t label = 0; label < e.vault.ordinates.size(); ++label) {
        FieldElement y = f.evaluate(fe(static_cast<std::uint32_t>(label)));
        if (features.count(static_cast<std::uint32_t>(label)))
            CHECK(e.vault.ordinates[label] == y);
        else
            CHECK(e.vault.ordinates[label] != y);
    }
}

TEST_CASE("enrollment failure modes")
{
    Rng rng(139);
    Polynomial f = Polynomial::random(7, rng);
    MinutiaeTemplate tiny;
    tiny.width = 296;
    tiny.height = 560;
    tiny.minutiae = {{50.0, 50.0, 10.0, 0.9}, {60.0, 50.0, 10.0, 0.8}};
    CHECK_THROWS_AS(gridEnroll(tiny, {}, f, 1), FailureToCapture);

    // A universe beyond the field order is rejected outright.
    GridParams huge;
    huge.lambda = 5.0;
    huge.s = 12;
    MinutiaeTemplate tmpl = paperScaleFinger(139);
    CHECK_THROWS_AS(gridEnroll(tmpl, huge, f, 1), std::domain_error);
}

TEST_CASE("self unlock succeeds, impostor does not")
{
    Rng rng(149);
    MinutiaeTemplate tmpl = paperScaleFinger(149);
    Polynomial f = Polynomial::random(7, rng);
    GridEnrollment e = gridEnroll(tmpl, {}, f, 53);

    DecodeOutcome self = gridUnlockExhaustive(e.vault, tmpl);
    REQUIRE(self.success());
    CHECK(*self.secret == f);
    CHECK(self.subsetsTried == 1);

    DecodeOutcome random1 = gridUnlock(e.vault, tmpl, 4096, 777);
    DecodeOutcome random2 = gridUnlock(e.vault, tmpl, 4096, 777);
    CHECK(random1.success() == random2.success());
    CHECK(random1.subsetsTried == random2.subsetsTried);

    MinutiaeTemplate other = paperScaleFinger(150);
    DecodeOutcome impostor = gridUnlock(e.vault, other, 2048, 11);
    CHECK_FALSE(impostor.success());
}

TEST_CASE("randomized success probability frozen values")
{
    CHECK(decodeSuccessProbability(44, 9, 7, 65536) ==
          doctest::Approx(0.059710416).epsilon(1e-6));
    CHECK(decodeSuccessProbability(44, 6, 7, 65536) == 0.0);
    CHECK(decodeSuccessProbability(10, 8, 3, 1) == doctest::Approx(56.0 / 120.0));
    // More draws never hurt.
    double prev = 0.0;
    for (std::uint64_t d = 1; d <= 1u << 16; d *= 4) {
        double p = decodeSuccessProbability(44, 9, 7, d);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("published features are enrollment independent")
{
    GridParams params;
    std::vector<Minutia> a = gridFeatureMinutiae(params);
    std::vector<Minutia> b = gridFeatureMinutiae(params);
    REQUIRE(a.size() == 1452);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].a == b[i].a);
        CHECK(a[i].b == b[i].b);
        CHECK(a[i].theta == b[i].theta);
    }
}

TEST_CASE("grid vault serialization round trips")
{
    Rng rng(151);
    MinutiaeTemplate tmpl = paperScaleFinger(151);
    Polynomial f = Polynomial::random(7, rng);
    GridEnrollment e = gridEnroll(tmpl, {}, f, 59);
    std::vector<std::uint8_t> blob = serializeGridVault(e.vault);
    GridVault back = deserializeGridVault(blob);
    CHECK(serializeGridVault(back) == blob);
    CHECK(back.digest == e.vault.digest);
    CHECK(back.ordinates == e.vault.ordinates);

    std::vector<std::uint8_t> truncated(blob.begin(), blob.begin() + 16);
    CHECK_THROWS_AS(deserializeGridVault(truncated), ParseError);
}

TEST_CASE("training on clean data is perfect and breaks ties by ratio")
{
    // Three fingers, two zero-noise impressions each: every configuration
    // scores GAR = 1, FAR = 0, so the ratio k/tMax decides.
    std::vector<GridTrainingSample> fingers;
    for (std::uint64_t s = 1; s <= 3; ++s) {
        GridTrainingSample sample;
        MinutiaeTemplate master = paperScaleFinger(s + 900);
        for (int imp = 0; imp < 2; ++imp) {
            sample.impressions.push_back(master);
            sample.transforms.push_back(RigidTransform::identity());
        }
        fingers.push_back(std::move(sample));
    }
    GridSearchSpace space;
    space.lambdas = {29.0};
    space.directionLevels = {6};
    space.tMaxValues = {40, 44};
    space.kValues = {7, 8};
    GridTrainingResult result = trainParameters(fingers, space);
    REQUIRE(result.table.size() == 4);
    for (const GridScoreRow& row : result.table) {
        CHECK(row.gar == doctest::Approx(1.0));
        CHECK(row.far == doctest::Approx(0.0));
    }
    // max ratio: 8/40 = 0.2 beats 8/44, 7/40 and 7/44.
    CHECK(result.best.k == 8);
    CHECK(result.best.tMax == 40);
}

} // TEST_SUITE("grid vault")

TEST_SUITE("stats") {

TEST_CASE("point estimates and interval endpoints")
{
    CHECK(pointEstimate({27, 4856}) == doctest::Approx(27.0 / 4856.0));
    ConfidenceInterval zero = clopperPearson({0, 100});
    CHECK(zero.lower == 0.0);
    CHECK(zero.upper > 0.0);
    ConfidenceInterval full = clopperPearson({100, 100});
    CHECK(full.upper == 1.0);
    CHECK(full.lower < 1.0);
}

TEST_CASE("frozen exact intervals")
{
    ConfidenceInterval a = clopperPearson({27, 4856});
    CHECK(a.lower == doctest::Approx(0.0036672644200734794).epsilon(1e-8));
    CHECK(a.upper == doctest::Approx(0.008079463324975222).epsilon(1e-8));
    ConfidenceInterval b = clopperPearson({14, 34650});
    CHECK(b.lower == doctest::Approx(0.00022091).epsilon(1e-4));
    CHECK(b.upper == doctest::Approx(0.00067782).epsilon(1e-4));
}

TEST_CASE("rule of three")
{
    CHECK(ruleOfThree(4856).upper == doctest::Approx(3.0 / 4856.0).epsilon(1e-12));
    CHECK(ruleOfThree(9900).upper == doctest::Approx(3.0 / 9900.0).epsilon(1e-12));
    CHECK(ruleOfThree(100).lower == 0.0);
}

TEST_CASE("median trials")
{
    CHECK(medianTrials(8.53e-10) == doctest::Approx(812599273.46).epsilon(1e-9));
    CHECK(medianTrials(1.0) == doctest::Approx(1.0));
    CHECK(medianTrials(0.5) == doctest::Approx(1.0));
    CHECK(medianTrials(1e-3) > medianTrials(1e-2));
}

TEST_CASE("false-accept cost arithmetic")
{
    CHECK(faCost(0.0056, 0.198, 1) == doctest::Approx(24.439).epsilon(1e-3));
    CHECK(faCost(0.0056, 0.198, 4) == doctest::Approx(24.439 / 4.0).epsilon(1e-3));
}

TEST_CASE("randomized-decoder cost report")
{
    std::vector<UnlockingStatsEntry> entries = {{44, 9}, {44, 10}, {40, 6}};
    RandomizedDecoderCost cost = faCostRandomizedDecoder(entries, 7, 65536);
    double farByHand = (decodeSuccessProbability(44, 9, 7, 65536) +
                        decodeSuccessProbability(44, 10, 7, 65536) + 0.0) /
                       3.0;
    CHECK(cost.far == doctest::Approx(farByHand).epsilon(1e-12));
    CHECK(cost.costIterations >= cost.costIterationsSingleDraw);

    std::vector<UnlockingStatsEntry> hopeless = {{44, 3}, {30, 0}};
    RandomizedDecoderCost inf = faCostRandomizedDecoder(hopeless, 7, 16);
    CHECK(inf.far == 0.0);
    CHECK(std::isinf(inf.medianAttempts));
    CHECK(std::isinf(inf.costIterations));

    CHECK_THROWS_AS(faCostRandomizedDecoder({}, 7, 16), std::domain_error);
    CHECK_THROWS_AS(faCostRandomizedDecoder(entries, 7, 0), std::domain_error);
}

} // TEST_SUITE("stats")

TEST_SUITE("attacks") {

TEST_CASE("brute force recovers small vaults scheduling-independently")
{
    Rng rng(157);
    Polynomial f = Polynomial::random(3, rng);
    std::vector<VaultPoint> points = pointsOnPolynomial(f, 20, 8);
    AttackReport one = bruteForceAttack(points, 3, polyHash(f), 42, 1000000, 1);
    AttackReport three = bruteForceAttack(points, 3, polyHash(f), 42, 1000000, 3);
    REQUIRE(one.success);
    REQUIRE(three.success);
    CHECK(one.iterations == three.iterations);
    CHECK(*one.recoveredSecret == f);
    CHECK(*three.recoveredSecret == f);

    // Unreachable digest: every iteration is consumed.
    SecretDigest wrong{};
    AttackReport spent = bruteForceAttack(points, 3, wrong, 42, 500, 1);
    CHECK_FALSE(spent.success);
    CHECK(spent.iterations == 500);
}

TEST_CASE("false-accept attack replays queries in order")
{
    int calls = 0;
    auto authenticate = [&calls](const MinutiaeTemplate& q) {
        ++calls;
        DecodeOutcome out;
        if (q.minutiae.size() == 5) {
            out.secret = Polynomial(std::vector<FieldElement>{fe(1)});
            out.subsetsTried = 1;
        } else {
            out.failure = DecodeFailure::SearchExhausted;
            out.subsetsTried = 3;
        }
        return out;
    };
    std::vector<MinutiaeTemplate> queries(4);
    queries[0].minutiae.resize(3);
    queries[1].minutiae.resize(4);
    queries[2].minutiae.resize(5);
    queries[3].minutiae.resize(6);
    AttackReport report = falseAcceptAttack(authenticate, queries);
    CHECK(report.success);
    CHECK(report.iterations == 3); // 1-based index of the first accept
    CHECK(calls == 3);             // later queries are never consumed

    queries[2].minutiae.resize(7);
    AttackReport failed = falseAcceptAttack(authenticate, queries);
    CHECK_FALSE(failed.success);
    CHECK(failed.iterations == 4);
}

TEST_CASE("correlation score: identical lists score their size")
{
    MinutiaeTemplate tmpl = paperScaleFinger(163);
    CorrelationResult r = correlationScore(tmpl.minutiae, tmpl.minutiae, 296, 560);
    CHECK(r.score == doctest::Approx(static_cast<double>(tmpl.minutiae.size())));
    REQUIRE(r.matchedPairs.size() == tmpl.minutiae.size());
    for (const auto& [i, j] : r.matchedPairs)
        CHECK(i == j);
}

TEST_CASE("correlation score is symmetric")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        MinutiaeTemplate a = paperScaleFinger(seed + 170);
        MinutiaeTemplate b = paperScaleFinger(seed + 270);
        CorrelationResult ab = correlationScore(a.minutiae, b.minutiae, 296, 560);
        CorrelationResult ba = correlationScore(b.minutiae, a.minutiae, 296, 560);
        CHECK(ab.score == ba.score);
        CHECK(ab.matchedPairs.size() == ba.matchedPairs.size());
    }
}

TEST_CASE("correlation attack on a re-enrolled template")
{
    Rng rng(167);
    MinutiaeTemplate tmpl = paperScaleFinger(167);
    Polynomial fa = Polynomial::random(9, rng);
    Polynomial fb = Polynomial::random(9, rng);
    ClassicEnrollment ea = enrollClassic(tmpl, {}, fa, 61);
    ClassicEnrollment eb = enrollClassic(tmpl, {}, fb, 62);
    AttackReport report = correlationAttack(ea.vault, eb.vault, 1400000);
    REQUIRE(report.success);
    CHECK(*report.recoveredSecret == fa);
}

TEST_CASE("correlation attack rejects when too few pairs match")
{
    // Vault A spreads its minutiae 100 apart; vault B packs all of its
    // minutiae into an 11-unit cluster. No rigid motion can bring more than
    // one B minutia within the pairing gate of distinct A minutiae, so the
    // candidate set always stays below k.
    ClassicVault a, b;
    a.params.k = 9;
    a.params.tMax = 24;
    a.width = b.width = 1300;
    a.height = b.height = 200;
    Rng rng(173);
    Polynomial f = Polynomial::random(9, rng);
    for (int i = 0; i < 12; ++i) {
        a.vaultMinutiae.push_back({100.0 * i + 50.0, 100.0, 0.0, 0.9});
        a.points.push_back({fe(i), f.evaluate(fe(i))});
        b.vaultMinutiae.push_back({600.0 + 1.0 * i, 100.0, 180.0, 0.9});
        b.points.push_back({fe(i), fe(7)});
    }
    a.digest = polyHash(f);
    b.params = a.params;
    b.digest = polyHash(f);
    AttackReport report = correlationAttack(a, b, 1000);
    CHECK_FALSE(report.success);
    CHECK(report.iterations == 0); // candidate set below k: nothing to try
}

TEST_CASE("grid vaults expose nothing to correlate")
{
    Rng rng(179);
    MinutiaeTemplate t1 = paperScaleFinger(179);
    MinutiaeTemplate t2 = paperScaleFinger(180);
    Polynomial f1 = Polynomial::random(7, rng);
    Polynomial f2 = Polynomial::random(7, rng);
    GridEnrollment e1 = gridEnroll(t1, {}, f1, 67);
    GridEnrollment e2 = gridEnroll(t2, {}, f2, 68);
    AttackReport report = correlationAttack(e1.vault, e2.vault, 2000);
    CHECK(report.metadata.at("correlationScore") == std::to_string(e2.vault.ordinates.size()));
    CHECK(report.metadata.at("candidatePoints") == std::to_string(e1.vault.ordinates.size()));
}

} // TEST_SUITE("attacks")

TEST_SUITE("eval") {

TEST_CASE("dataset loader validates its layout")
{
    fs::path dir = freshScratchDir("fpvault_unit_dataset");
    MinutiaeTemplate t1 = paperScaleFinger(191);
    MinutiaeTemplate t2 = paperScaleFinger(192);
    writeTemplate((dir / "finger1_imp1.txt").string(), t1);
    writeTemplate((dir / "finger1_imp2.txt").string(), t1);
    writeTemplate((dir / "finger2_imp1.txt").string(), t2);
    writeTemplate((dir / "finger2_imp2.txt").string(), t2);
    Dataset ds = loadDataset(dir.string());
    REQUIRE(ds.fingers.size() == 2);
    CHECK(ds.fingers[0].impressions.size() == 2);
    CHECK(ds.width == 296);

    // A gap in impression numbering is rejected.
    writeTemplate((dir / "finger2_imp4.txt").string(), t2);
    CHECK_THROWS_AS(loadDataset(dir.string()), ParseError);
    fs::remove(dir / "finger2_imp4.txt");

    // Missing descriptors are rejected when descriptors are required.
    CHECK_THROWS_AS(loadDataset(dir.string(), 511), ParseError);

    // Inconsistent regions are rejected.
    MinutiaeTemplate odd = synthesizeFinger(5, 40, 300, 560, 25.0);
    writeTemplate((dir / "finger3_imp1.txt").string(), odd);
    writeTemplate((dir / "finger3_imp2.txt").string(), odd);
    CHECK_THROWS_AS(loadDataset(dir.string()), ParseError);
}

TEST_CASE("protocol trial arithmetic and determinism")
{
    Dataset ds;
    ds.width = 296;
    ds.height = 560;
    for (std::uint64_t s = 1; s <= 3; ++s) {
        FingerRecord finger;
        finger.fingerId = static_cast<std::uint32_t>(s);
        MinutiaeTemplate master = paperScaleFinger(s + 400);
        for (int imp = 0; imp < 3; ++imp) {
            ImpressionRecord rec;
            rec.tmpl = master;
            rec.transform = RigidTransform::identity();
            rec.hasTransform = true;
            finger.impressions.push_back(std::move(rec));
        }
        ds.fingers.push_back(std::move(finger));
    }

    EvalConfig config;
    config.scheme = Scheme::Classic;
    config.budget = 20000;
    config.seed = 9;
    EvaluationReport report = runFvcProtocol(ds, config);

    // 3 impressions: genuine pairs C(3,2) = 3 per finger; impostor pairs
    // C(3,2) = 3 across fingers; both enrollable impressions count for ftc.
    CHECK(report.gar.trials == 9);
    CHECK(report.subGar.trials == 3);
    CHECK(report.far.trials == 3);
    CHECK(report.ftc.trials == 6);
    CHECK(report.fingers == 3);
    CHECK(report.impressions == 9);

    // Zero noise: every genuine attempt succeeds, nothing false-accepts.
    CHECK(report.gar.successes == 9);
    CHECK(report.subGar.successes == 3);
    CHECK(report.far.successes == 0);
    CHECK(report.ftc.successes == 0);

    EvaluationReport again = runFvcProtocol(ds, config);
    CHECK(again.gar.successes == report.gar.successes);
    CHECK(again.far.successes == report.far.successes);
    CHECK(again.subGar.successes == report.subGar.successes);
}

TEST_CASE("unlocking statistics over impostor pairs")
{
    Dataset ds;
    ds.width = 296;
    ds.height = 560;
    for (std::uint64_t s = 1; s <= 4; ++s) {
        FingerRecord finger;
        finger.fingerId = static_cast<std::uint32_t>(s);
        ImpressionRecord rec;
        rec.tmpl = paperScaleFinger(s + 440);
        finger.impressions.push_back(std::move(rec));
        ds.fingers.push_back(std::move(finger));
    }
    GridParams params;
    UnlockingStats stats = runUnlockingStats(ds, params, 65536);
    REQUIRE(stats.entries.size() == 6); // C(4,2) impostor pairs
    for (const UnlockingStatsEntry& e : stats.entries) {
        CHECK(e.t <= params.tMax);
        CHECK(e.omega <= e.t);
    }
    RandomizedDecoderCost direct = faCostRandomizedDecoder(stats.entries, params.k, 65536);
    CHECK(stats.cost.far == direct.far);
    // Exact equality also covers the all-impostor case where both are inf.
    CHECK(stats.cost.costIterations == direct.costIterations);
}

} // TEST_SUITE("eval")

#pragma once

#include <cstdint>

namespace fpvault {

struct TrialRecord {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
};

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 1.0;
    double level = 0.95;
};

// successes / trials; trials must be positive.
double pointEstimate(const TrialRecord& record);

// Exact (Clopper-Pearson) two-sided interval: the lower bound is the largest
// p with P(X >= s | N, p) <= (1-level)/2 (0 when s == 0), the upper bound the
// smallest p with P(X <= s | N, p) <= (1-level)/2 (1 when s == N). Both are
// found by bisection on high-precision binomial tail sums to an absolute
// tolerance of 1e-10, avoiding any special-function dependency.
ConfidenceInterval clopperPearson(const TrialRecord& record, double level = 0.95);

// The zero-failure shortcut: after N trials with no successes the 95% upper
// bound is approximately 3 / N.
ConfidenceInterval ruleOfThree(std::uint64_t trials);

// Number of independent attempts with per-attempt success probability p
// needed for a >= 50% overall success chance: log(0.5) / log(1 - p).
// p must lie in (0, 1]; p == 1 yields 1.
double medianTrials(double p);

} // namespace fpvault

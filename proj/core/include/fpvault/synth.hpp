#pragma once

#include <cstdint>
#include <vector>

#include "fpvault/minutia.hpp"

namespace fpvault {

// Synthetic master template: `count` minutiae placed uniformly in the region
// with pairwise dissimilarity > minSeparation (rejection sampling), uniform
// directions, qualities uniform in [0.5, 1]. Deterministic in `seed`.
// Throws GenerationError when the region cannot accommodate the request.
MinutiaeTemplate synthesizeFinger(std::uint64_t seed, std::size_t count, std::uint32_t width,
                                  std::uint32_t height, double minSeparation);

// A derived impression plus provenance: sourceIndex[i] is the index of the
// master minutia that produced minutia i, or -1 for a spurious one.
struct SynthesizedImpression {
    MinutiaeTemplate tmpl;
    std::vector<int> sourceIndex;
};

// Derives a noisy impression of `master`: drops each minutia independently
// with dropRate, jitters surviving positions (Gaussian posNoise per axis)
// and directions (Gaussian angNoise, wrapped), perturbs qualities (Gaussian
// qualityNoise, clamped to [0, 1]), adds spuriousCount uniform random
// minutiae, applies the rigid motion, clips to the region, and re-sorts by
// quality. With all noise parameters zero, zero drops/spurious and the
// identity motion the master is reproduced exactly.
SynthesizedImpression synthesizeImpression(const MinutiaeTemplate& master, std::uint64_t seed,
                                           double posNoise, double angNoise, double dropRate,
                                           std::size_t spuriousCount,
                                           const RigidTransform& transform,
                                           double qualityNoise = 0.0);

} // namespace fpvault

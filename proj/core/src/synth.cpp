#include "fpvault/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fpvault/errors.hpp"
#include "fpvault/rng.hpp"

namespace fpvault {

MinutiaeTemplate synthesizeFinger(std::uint64_t seed, std::size_t count, std::uint32_t width,
                                  std::uint32_t height, double minSeparation)
{
    MinutiaeTemplate tmpl;
    tmpl.width = width;
    tmpl.height = height;
    tmpl.minutiae.reserve(count);

    Rng rng(seed);
    std::size_t budget = 1000 + 200 * count;
    while (tmpl.minutiae.size() < count) {
        if (budget-- == 0)
            throw GenerationError("synthesizeFinger: proposal budget exhausted placing " +
                                  std::to_string(count) + " minutiae at separation " +
                                  std::to_string(minSeparation));
        Minutia m;
        m.a = rng.unitReal() * width;
        m.b = rng.unitReal() * height;
        m.theta = rng.unitReal() * 360.0;
        m.quality = 0.5 + rng.unitReal() * 0.5;
        bool separated = true;
        for (const Minutia& kept : tmpl.minutiae) {
            if (minutiaeDissimilarity(m, kept) <= minSeparation) {
                separated = false;
                break;
            }
        }
        if (separated)
            tmpl.minutiae.push_back(m);
    }
    std::stable_sort(tmpl.minutiae.begin(), tmpl.minutiae.end(),
                     [](const Minutia& x, const Minutia& y) { return x.quality > y.quality; });
    return tmpl;
}

SynthesizedImpression synthesizeImpression(const MinutiaeTemplate& master, std::uint64_t seed,
                                           double posNoise, double angNoise, double dropRate,
                                           std::size_t spuriousCount,
                                           const RigidTransform& transform, double qualityNoise)
{
    Rng rng(seed);
    std::vector<Minutia> raw;
    std::vector<int> source;
    raw.reserve(master.minutiae.size() + spuriousCount);

    auto wrap = [](double theta) {
        double w = std::fmod(theta, 360.0);
        if (w < 0.0)
            w += 360.0;
        return w;
    };

    for (std::size_t i = 0; i < master.minutiae.size(); ++i) {
        if (rng.unitReal() < dropRate)
            continue;
        Minutia m = master.minutiae[i];
        m.a += rng.gaussian(posNoise);
        m.b += rng.gaussian(posNoise);
        m.theta = wrap(m.theta + rng.gaussian(angNoise));
        m.quality = std::clamp(m.quality + rng.gaussian(qualityNoise), 0.0, 1.0);
        raw.push_back(m);
        source.push_back(static_cast<int>(i));
    }
    for (std::size_t s = 0; s < spuriousCount; ++s) {
        Minutia m;
        m.a = rng.unitReal() * master.width;
        m.b = rng.unitReal() * master.height;
        m.theta = rng.unitReal() * 360.0;
        m.quality = 0.5 + rng.unitReal() * 0.5;
        raw.push_back(m);
        source.push_back(-1);
    }

    std::vector<Minutia> moved;
    std::vector<int> movedSource;
    moved.reserve(raw.size());
    movedSource.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        Minutia m = applyTransform(raw[i], transform);
        if (m.a < 0.0 || m.a > master.width || m.b < 0.0 || m.b > master.height)
            continue;
        moved.push_back(m);
        movedSource.push_back(source[i]);
    }

    std::vector<std::size_t> order(moved.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return moved[x].quality > moved[y].quality;
    });

    SynthesizedImpression out;
    out.tmpl.width = master.width;
    out.tmpl.height = master.height;
    out.tmpl.minutiae.reserve(moved.size());
    out.sourceIndex.reserve(moved.size());
    for (std::size_t idx : order) {
        out.tmpl.minutiae.push_back(moved[idx]);
        out.sourceIndex.push_back(movedSource[idx]);
    }
    return out;
}

} // namespace fpvault

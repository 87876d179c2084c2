#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fpvault {

// A fingerprint minutia: position in pixels, direction in degrees [0, 360),
// and a quality score in [0, 1] used to rank minutiae for selection.
struct Minutia {
    double a = 0.0;
    double b = 0.0;
    double theta = 0.0;
    double quality = 0.0;
};

// Minutiae of one impression, sorted by quality (best first), together with
// the sensor region they live in: [0, width] x [0, height] pixels.
struct MinutiaeTemplate {
    std::vector<Minutia> minutiae;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
};

// Shortest distance between two directions on the 360-degree circle.
double angularDistance(double theta1, double theta2);

// Dissimilarity used throughout for separation and matching decisions:
// Euclidean position distance plus 0.2 * angular distance.
double minutiaeDissimilarity(const Minutia& m1, const Minutia& m2);

// Greedy quality-first selection of pairwise well-separated minutiae: walk
// the quality ranking and keep a minutia iff its dissimilarity to every
// already-kept one exceeds `threshold`, stopping once tMax are kept.
// Returns indices into tmpl.minutiae in the order kept.
// Throws FailureToCapture when fewer than tMin survive.
std::vector<std::size_t> selectWellSeparatedIndices(const MinutiaeTemplate& tmpl,
                                                    std::size_t tMin, std::size_t tMax,
                                                    double threshold);

// Same selection, materialized as minutiae.
std::vector<Minutia> selectWellSeparated(const MinutiaeTemplate& tmpl, std::size_t tMin,
                                         std::size_t tMax, double threshold);

// Rigid motion: rotate by rotationDeg around center (cx, cy), then translate
// by (dx, dy). Directions shift by rotationDeg (mod 360); quality is kept.
struct RigidTransform {
    double dx = 0.0;
    double dy = 0.0;
    double rotationDeg = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    static RigidTransform identity() { return {}; }
};

Minutia applyTransform(const Minutia& m, const RigidTransform& t);

// Applies the motion to every minutia; region bounds and ordering are kept
// (positions may leave the region — callers decide whether to clip).
MinutiaeTemplate applyTransform(const MinutiaeTemplate& tmpl, const RigidTransform& t);

// Composition outer∘inner and inversion, both renormalized to center (0, 0).
RigidTransform composeTransforms(const RigidTransform& outer, const RigidTransform& inner);
RigidTransform invertTransform(const RigidTransform& t);

// --- Text interchange formats ------------------------------------------------
//
// Template file: first line "width height", then one minutia per line as
// "a b theta quality". Whitespace separated, '#' starts a comment line.
// The loader validates ranges (position inside the region, theta in
// [0, 360), quality in [0, 1]) and sorts by quality.
MinutiaeTemplate readTemplate(const std::string& path);
void writeTemplate(const std::string& path, const MinutiaeTemplate& tmpl);

// Transform sidecar: single line "dx dy rotationDeg cx cy".
RigidTransform readTransform(const std::string& path);
void writeTransform(const std::string& path, const RigidTransform& t);

} // namespace fpvault

#pragma once

#include <cstdint>
#include <vector>

#include "fpvault/minutia.hpp"

namespace fpvault {

struct GridPoint {
    double x = 0.0;
    double y = 0.0;
};

// Hexagonal grid covering [0, width] x [0, height]: rows at vertical pitch
// lambda * sqrt(3) / 2, horizontal pitch lambda, odd rows offset by
// lambda / 2. Points are listed row-major (y, then x ascending), so the
// layout is a pure function of (lambda, width, height).
struct HexGrid {
    double lambda = 0.0;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<GridPoint> points;

    std::size_t size() const { return points.size(); }
};

HexGrid buildHexGrid(double lambda, std::uint32_t width, std::uint32_t height);

// Index of the grid point closest to (a, b) in Euclidean distance; ties go
// to the lowest index.
std::size_t nearestGridIndex(const HexGrid& grid, double a, double b);

// Quantizes a minutia to its feature label i + r * j, where i is the nearest
// grid point among the r grid points and j = floor(theta * s / 360) is the
// direction bucket among s levels.
std::uint32_t quantizeMinutia(const HexGrid& grid, std::uint32_t s, const Minutia& m);

// The minutia a feature label represents: the grid point position plus the
// direction bucket's center angle.
Minutia featureMinutia(const HexGrid& grid, std::uint32_t s, std::uint32_t label);

} // namespace fpvault

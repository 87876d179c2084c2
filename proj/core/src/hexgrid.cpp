#include "fpvault/hexgrid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fpvault {

HexGrid buildHexGrid(double lambda, std::uint32_t width, std::uint32_t height)
{
    if (!(lambda > 0.0))
        throw std::domain_error("buildHexGrid: lambda must be positive");
    HexGrid grid;
    grid.lambda = lambda;
    grid.width = width;
    grid.height = height;

    const double rowHeight = lambda * std::sqrt(3.0) / 2.0;
    const double eps = 1e-9;
    for (std::uint32_t row = 0;; ++row) {
        double y = row * rowHeight;
        if (y > height + eps)
            break;
        double offset = (row % 2 == 1) ? lambda / 2.0 : 0.0;
        for (std::uint32_t col = 0;; ++col) {
            double x = offset + col * lambda;
            if (x > width + eps)
                break;
            grid.points.push_back({x, y});
        }
    }
    return grid;
}

std::size_t nearestGridIndex(const HexGrid& grid, double a, double b)
{
    if (grid.points.empty())
        throw std::domain_error("nearestGridIndex: empty grid");
    std::size_t best = 0;
    double bestDist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        double dx = grid.points[i].x - a;
        double dy = grid.points[i].y - b;
        double d = dx * dx + dy * dy;
        if (d < bestDist) {
            bestDist = d;
            best = i;
        }
    }
    return best;
}

std::uint32_t quantizeMinutia(const HexGrid& grid, std::uint32_t s, const Minutia& m)
{
    if (s == 0)
        throw std::domain_error("quantizeMinutia: need at least one direction level");
    std::size_t i = nearestGridIndex(grid, m.a, m.b);
    std::uint32_t j = static_cast<std::uint32_t>(m.theta * s / 360.0);
    if (j >= s)
        j = s - 1; // guard against theta == 360 after rounding
    return static_cast<std::uint32_t>(i) + static_cast<std::uint32_t>(grid.size()) * j;
}

Minutia featureMinutia(const HexGrid& grid, std::uint32_t s, std::uint32_t label)
{
    const std::uint32_t r = static_cast<std::uint32_t>(grid.size());
    if (s == 0 || label >= r * s)
        throw std::domain_error("featureMinutia: label out of range");
    std::uint32_t i = label % r;
    std::uint32_t j = label / r;
    Minutia m;
    m.a = grid.points[i].x;
    m.b = grid.points[i].y;
    m.theta = (j + 0.5) * 360.0 / s;
    m.quality = 0.0;
    return m;
}

} // namespace fpvault

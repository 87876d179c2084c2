#include "fpvault/minutia.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fpvault/errors.hpp"

namespace fpvault {

double angularDistance(double theta1, double theta2)
{
    double d = std::fabs(theta1 - theta2);
    return std::min(d, 360.0 - d);
}

double minutiaeDissimilarity(const Minutia& m1, const Minutia& m2)
{
    double da = m1.a - m2.a;
    double db = m1.b - m2.b;
    return std::sqrt(da * da + db * db) + 0.2 * angularDistance(m1.theta, m2.theta);
}

std::vector<std::size_t> selectWellSeparatedIndices(const MinutiaeTemplate& tmpl,
                                                    std::size_t tMin, std::size_t tMax,
                                                    double threshold)
{
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < tmpl.minutiae.size() && kept.size() < tMax; ++i) {
        bool separated = true;
        for (std::size_t j : kept) {
            if (minutiaeDissimilarity(tmpl.minutiae[i], tmpl.minutiae[j]) <= threshold) {
                separated = false;
                break;
            }
        }
        if (separated)
            kept.push_back(i);
    }
    if (kept.size() < tMin)
        throw FailureToCapture("selectWellSeparated: only " + std::to_string(kept.size()) +
                               " well-separated minutiae, need at least " + std::to_string(tMin));
    return kept;
}

std::vector<Minutia> selectWellSeparated(const MinutiaeTemplate& tmpl, std::size_t tMin,
                                         std::size_t tMax, double threshold)
{
    std::vector<Minutia> out;
    for (std::size_t i : selectWellSeparatedIndices(tmpl, tMin, tMax, threshold))
        out.push_back(tmpl.minutiae[i]);
    return out;
}

namespace {

double wrapDegrees(double theta)
{
    double w = std::fmod(theta, 360.0);
    if (w < 0.0)
        w += 360.0;
    return w;
}

} // namespace

Minutia applyTransform(const Minutia& m, const RigidTransform& t)
{
    double rad = t.rotationDeg * (3.14159265358979323846 / 180.0);
    double c = std::cos(rad);
    double s = std::sin(rad);
    double px = m.a - t.cx;
    double py = m.b - t.cy;
    Minutia out;
    out.a = c * px - s * py + t.cx + t.dx;
    out.b = s * px + c * py + t.cy + t.dy;
    out.theta = wrapDegrees(m.theta + t.rotationDeg);
    out.quality = m.quality;
    return out;
}

MinutiaeTemplate applyTransform(const MinutiaeTemplate& tmpl, const RigidTransform& t)
{
    MinutiaeTemplate out;
    out.width = tmpl.width;
    out.height = tmpl.height;
    out.minutiae.reserve(tmpl.minutiae.size());
    for (const Minutia& m : tmpl.minutiae)
        out.minutiae.push_back(applyTransform(m, t));
    return out;
}

RigidTransform composeTransforms(const RigidTransform& outer, const RigidTransform& inner)
{
    // Normalize both to p' = R p + u form, then compose linearly.
    auto normalize = [](const RigidTransform& t, double& cos_, double& sin_, double& ux,
                        double& uy) {
        double rad = t.rotationDeg * (3.14159265358979323846 / 180.0);
        cos_ = std::cos(rad);
        sin_ = std::sin(rad);
        // u = c - R c + d
        ux = t.cx - (cos_ * t.cx - sin_ * t.cy) + t.dx;
        uy = t.cy - (sin_ * t.cx + cos_ * t.cy) + t.dy;
    };
    double c1, s1, u1x, u1y, c2, s2, u2x, u2y;
    normalize(inner, c1, s1, u1x, u1y);
    normalize(outer, c2, s2, u2x, u2y);
    RigidTransform out;
    out.rotationDeg = wrapDegrees(outer.rotationDeg + inner.rotationDeg);
    out.dx = c2 * u1x - s2 * u1y + u2x;
    out.dy = s2 * u1x + c2 * u1y + u2y;
    out.cx = 0.0;
    out.cy = 0.0;
    return out;
}

RigidTransform invertTransform(const RigidTransform& t)
{
    double rad = t.rotationDeg * (3.14159265358979323846 / 180.0);
    double c = std::cos(rad);
    double s = std::sin(rad);
    double ux = t.cx - (c * t.cx - s * t.cy) + t.dx;
    double uy = t.cy - (s * t.cx + c * t.cy) + t.dy;
    RigidTransform out;
    out.rotationDeg = wrapDegrees(-t.rotationDeg);
    // p = R^T (p' - u)
    out.dx = -(c * ux + s * uy);
    out.dy = -(-s * ux + c * uy);
    out.cx = 0.0;
    out.cy = 0.0;
    return out;
}

namespace {

bool isFiniteNumber(double v)
{
    return std::isfinite(v);
}

} // namespace

MinutiaeTemplate readTemplate(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("readTemplate: cannot open " + path);

    MinutiaeTemplate tmpl;
    std::string line;
    bool headerSeen = false;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        if (!headerSeen) {
            long long w, h;
            if (!(fields >> w >> h))
                continue; // blank or comment before the header
            std::string trailing;
            if (fields >> trailing)
                throw ParseError("readTemplate: malformed header at line " +
                                 std::to_string(lineNo));
            if (w <= 0 || h <= 0)
                throw ParseError("readTemplate: non-positive region dimensions");
            tmpl.width = static_cast<std::uint32_t>(w);
            tmpl.height = static_cast<std::uint32_t>(h);
            headerSeen = true;
            continue;
        }
        Minutia m;
        if (!(fields >> m.a >> m.b >> m.theta >> m.quality))
        {
            std::istringstream recheck(line);
            std::string any;
            if (recheck >> any)
                throw ParseError("readTemplate: malformed minutia at line " +
                                 std::to_string(lineNo));
            continue; // blank line
        }
        std::string trailing;
        if (fields >> trailing)
            throw ParseError("readTemplate: trailing fields at line " + std::to_string(lineNo));
        if (!isFiniteNumber(m.a) || !isFiniteNumber(m.b) || !isFiniteNumber(m.theta) ||
            !isFiniteNumber(m.quality))
            throw ParseError("readTemplate: non-finite value at line " + std::to_string(lineNo));
        if (m.a < 0.0 || m.a > tmpl.width || m.b < 0.0 || m.b > tmpl.height)
            throw ParseError("readTemplate: position outside region at line " +
                             std::to_string(lineNo));
        if (m.theta < 0.0 || m.theta >= 360.0)
            throw ParseError("readTemplate: direction out of [0,360) at line " +
                             std::to_string(lineNo));
        if (m.quality < 0.0 || m.quality > 1.0)
            throw ParseError("readTemplate: quality out of [0,1] at line " +
                             std::to_string(lineNo));
        tmpl.minutiae.push_back(m);
    }
    if (!headerSeen)
        throw ParseError("readTemplate: missing header in " + path);
    std::stable_sort(tmpl.minutiae.begin(), tmpl.minutiae.end(),
                     [](const Minutia& x, const Minutia& y) { return x.quality > y.quality; });
    return tmpl;
}

void writeTemplate(const std::string& path, const MinutiaeTemplate& tmpl)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("writeTemplate: cannot open " + path);
    out << tmpl.width << " " << tmpl.height << "\n";
    char buf[128];
    for (const Minutia& m : tmpl.minutiae) {
        std::snprintf(buf, sizeof(buf), "%.4f %.4f %.4f %.6f\n", m.a, m.b, m.theta, m.quality);
        out << buf;
    }
    if (!out)
        throw ParseError("writeTemplate: write failed for " + path);
}

RigidTransform readTransform(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("readTransform: cannot open " + path);
    RigidTransform t;
    if (!(in >> t.dx >> t.dy >> t.rotationDeg >> t.cx >> t.cy))
        throw ParseError("readTransform: malformed transform in " + path);
    return t;
}

void writeTransform(const std::string& path, const RigidTransform& t)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("writeTransform: cannot open " + path);
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f %.6f\n", t.dx, t.dy, t.rotationDeg, t.cx,
                  t.cy);
    out << buf;
    if (!out)
        throw ParseError("writeTransform: write failed for " + path);
}

} // namespace fpvault

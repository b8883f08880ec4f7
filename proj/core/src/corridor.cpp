#include "omnitraj/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace omnitraj {

namespace {

Eigen::Vector3d closestPointOnSegment(const Eigen::Vector3d& a,
                                      const Eigen::Vector3d& b,
                                      const Eigen::Vector3d& p)
{
    const Eigen::Vector3d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 1e-24)
    {
        return a;
    }
    const double t = std::clamp(ab.dot(p - a) / len2, 0.0, 1.0);
    return a + t * ab;
}

double segmentDistanceSquared(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                              const Eigen::Vector3d& p)
{
    return (p - closestPointOnSegment(a, b, p)).squaredNorm();
}

// Library-independent uniform double in [0, 1).
double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

PointCloud::PointCloud(std::vector<Eigen::Vector3d> points, const Aabb& bounds)
    : points_(std::move(points)), bounds_(bounds)
{
    for (const auto& p : points_)
    {
        if (!p.allFinite())
        {
            throw std::invalid_argument("PointCloud: non-finite point");
        }
        if (!bounds_.contains(p))
        {
            throw std::invalid_argument("PointCloud: point outside bounds");
        }
    }
    buildIndex();
}

void PointCloud::buildIndex()
{
    const Eigen::Vector3d extent = bounds_.hi - bounds_.lo;
    for (int a = 0; a < 3; ++a)
    {
        dims_(a) = std::max(1, static_cast<int>(std::ceil(extent(a) / cell_)));
    }
    grid_.assign(static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z(), {});
    for (int i = 0; i < static_cast<int>(points_.size()); ++i)
    {
        const Eigen::Vector3d rel = points_[i] - bounds_.lo;
        const int ix = std::clamp(static_cast<int>(rel.x() / cell_), 0, dims_.x() - 1);
        const int iy = std::clamp(static_cast<int>(rel.y() / cell_), 0, dims_.y() - 1);
        const int iz = std::clamp(static_cast<int>(rel.z() / cell_), 0, dims_.z() - 1);
        grid_[cellKey(ix, iy, iz)].push_back(i);
    }
}

std::int64_t PointCloud::cellKey(int ix, int iy, int iz) const
{
    return (static_cast<std::int64_t>(iz) * dims_.y() + iy) * dims_.x() + ix;
}

bool PointCloud::anyWithin(const Eigen::Vector3d& p, double r) const
{
    if (points_.empty())
    {
        return false;
    }
    const double r2 = r * r;
    const Eigen::Vector3d rel = p - bounds_.lo;
    const int reach = static_cast<int>(std::ceil(r / cell_));
    const int cx = static_cast<int>(std::floor(rel.x() / cell_));
    const int cy = static_cast<int>(std::floor(rel.y() / cell_));
    const int cz = static_cast<int>(std::floor(rel.z() / cell_));
    for (int iz = std::max(0, cz - reach); iz <= std::min(dims_.z() - 1, cz + reach); ++iz)
    {
        for (int iy = std::max(0, cy - reach); iy <= std::min(dims_.y() - 1, cy + reach); ++iy)
        {
            for (int ix = std::max(0, cx - reach); ix <= std::min(dims_.x() - 1, cx + reach); ++ix)
            {
                for (int idx : grid_[cellKey(ix, iy, iz)])
                {
                    if ((points_[idx] - p).squaredNorm() <= r2)
                    {
                        return true;
                    }
                }
            }
        }
    }
    return false;
}

double PointCloud::nearestSquaredDistance(const Eigen::Vector3d& p) const
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : points_)
    {
        best = std::min(best, (q - p).squaredNorm());
    }
    return best;
}

bool segmentClear(const PointCloud& map, const Eigen::Vector3d& a,
                  const Eigen::Vector3d& b, double r)
{
    const double len = (b - a).norm();
    const double res = std::max(1e-6, r / 4.0);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / res)));
    for (int i = 0; i <= steps; ++i)
    {
        const double t = static_cast<double>(i) / steps;
        if (map.anyWithin(a + t * (b - a), r))
        {
            return false;
        }
    }
    return true;
}

Path rrtSearch(const PointCloud& map, const Eigen::Vector3d& start,
               const Eigen::Vector3d& goal, const RrtConfig& cfg)
{
    const double r = cfg.sphereRadius;
    if (!map.bounds().contains(start) || !map.bounds().contains(goal))
    {
        throw std::invalid_argument("rrtSearch: endpoint outside map bounds");
    }
    if (map.anyWithin(start, r) || map.anyWithin(goal, r))
    {
        throw std::invalid_argument("rrtSearch: endpoint in collision");
    }
    if (segmentClear(map, start, goal, r))
    {
        return {start, goal};
    }

    struct Node
    {
        Eigen::Vector3d p;
        int parent;
    };
    std::vector<Node> nodes;
    nodes.push_back({start, -1});

    std::mt19937_64 rng(cfg.seed);
    const Eigen::Vector3d lo = map.bounds().lo;
    const Eigen::Vector3d ext = map.bounds().hi - lo;

    for (int iter = 0; iter < cfg.maxIterations; ++iter)
    {
        Eigen::Vector3d sample;
        if (uniform01(rng) < cfg.goalBias)
        {
            sample = goal;
        }
        else
        {
            sample = lo + Eigen::Vector3d(uniform01(rng) * ext.x(),
                                          uniform01(rng) * ext.y(),
                                          uniform01(rng) * ext.z());
        }

        int nearest = 0;
        double bestDist = (nodes[0].p - sample).squaredNorm();
        for (int i = 1; i < static_cast<int>(nodes.size()); ++i)
        {
            const double d = (nodes[i].p - sample).squaredNorm();
            if (d < bestDist)
            {
                bestDist = d;
                nearest = i;
            }
        }

        const Eigen::Vector3d from = nodes[nearest].p;
        Eigen::Vector3d dir = sample - from;
        const double dist = dir.norm();
        if (dist < 1e-9)
        {
            continue;
        }
        const Eigen::Vector3d next = from + std::min(cfg.step, dist) / dist * dir;
        if (!map.bounds().contains(next) || !segmentClear(map, from, next, r))
        {
            continue;
        }
        nodes.push_back({next, nearest});

        if ((next - goal).norm() <= cfg.goalTol && segmentClear(map, next, goal, r))
        {
            Path chain;
            int node = static_cast<int>(nodes.size()) - 1;
            while (node >= 0)
            {
                chain.push_back(nodes[node].p);
                node = nodes[node].parent;
            }
            std::reverse(chain.begin(), chain.end());
            chain.push_back(goal);

            // Drop interior waypoints closer than 1e-6 to a kept neighbor;
            // endpoints stay exact.
            Path path;
            path.push_back(chain.front());
            for (std::size_t k = 1; k + 1 < chain.size(); ++k)
            {
                if ((chain[k] - path.back()).norm() > 1e-6)
                {
                    path.push_back(chain[k]);
                }
            }
            if (path.size() > 1 && (path.back() - goal).norm() <= 1e-6)
            {
                path.pop_back();
            }
            path.push_back(goal);
            return path;
        }
    }
    throw NoPathError("rrtSearch: iteration budget exhausted",
                      static_cast<int>(nodes.size()));
}

Path shortcut(const Path& path, const PointCloud& map, double r)
{
    if (path.size() <= 2)
    {
        return path;
    }
    Path out;
    out.push_back(path.front());
    std::size_t i = 0;
    const std::size_t last = path.size() - 1;
    while (i < last)
    {
        std::size_t j = last;
        while (j > i + 1 && !segmentClear(map, path[i], path[j], r))
        {
            --j;
        }
        out.push_back(path[j]);
        i = j;
    }
    return out;
}

Corridor decompose(const Path& rawPath, const PointCloud& map, const SfcConfig& cfg)
{
    if (rawPath.size() < 2)
    {
        throw std::invalid_argument("decompose: path needs at least two waypoints");
    }

    Path path;
    path.push_back(rawPath.front());
    for (std::size_t i = 0; i + 1 < rawPath.size(); ++i)
    {
        const Eigen::Vector3d step = rawPath[i + 1] - rawPath[i];
        const int pieces =
            std::max(1, static_cast<int>(std::ceil(step.norm() / cfg.maxSegment)));
        for (int k = 1; k <= pieces; ++k)
        {
            path.push_back(rawPath[i] + static_cast<double>(k) / pieces * step);
        }
    }

    Corridor corridor;
    corridor.path = path;

    const Polyhedron boundsBox = Polyhedron::box(map.bounds().lo, map.bounds().hi);
    constexpr double kCutOffset = 1e-6;

    for (std::size_t seg = 0; seg + 1 < path.size(); ++seg)
    {
        const Eigen::Vector3d& a = path[seg];
        const Eigen::Vector3d& b = path[seg + 1];
        Aabb segBox;
        segBox.lo = a.cwiseMin(b) - Eigen::Vector3d::Constant(cfg.margin);
        segBox.hi = a.cwiseMax(b) + Eigen::Vector3d::Constant(cfg.margin);
        Polyhedron poly = intersect(Polyhedron::box(segBox.lo, segBox.hi), boundsBox);

        while (true)
        {
            int closest = -1;
            double closestDist = std::numeric_limits<double>::infinity();
            for (int idx = 0; idx < static_cast<int>(map.points().size()); ++idx)
            {
                const Eigen::Vector3d& pt = map.points()[idx];
                if (poly.maxViolation(pt) >= 0.0)
                {
                    continue; // on or outside some face
                }
                const double d = segmentDistanceSquared(a, b, pt);
                if (d < closestDist)
                {
                    closestDist = d;
                    closest = idx;
                }
            }
            if (closest < 0)
            {
                break;
            }
            if (poly.faceCount() >= cfg.maxFaces)
            {
                throw SfcError("decompose: face budget exhausted with obstacle points "
                               "remaining inside segment polytope",
                               static_cast<int>(seg));
            }
            const Eigen::Vector3d& pt = map.points()[closest];
            const Eigen::Vector3d foot = closestPointOnSegment(a, b, pt);
            const Eigen::Vector3d dir = pt - foot;
            const double len = dir.norm();
            if (len < 1e-9)
            {
                throw SfcError("decompose: obstacle point on the path segment",
                               static_cast<int>(seg));
            }
            const Eigen::Vector3d n = dir / len;
            poly.add({n, n.dot(pt) - kCutOffset});
        }
        corridor.polys.push_back(std::move(poly));
    }
    return corridor;
}

std::vector<CorridorViolation> validate(const Corridor& corridor, const PointCloud* map)
{
    std::vector<CorridorViolation> out;
    const auto& polys = corridor.polys;
    const auto& path = corridor.path;

    if (polys.size() + 1 != path.size())
    {
        out.push_back({CorridorViolation::Kind::Containment, 0,
                       "polyhedron count does not match path segment count"});
        return out;
    }

    for (std::size_t i = 0; i < polys.size(); ++i)
    {
        const int samples = 32;
        for (int k = 0; k <= samples; ++k)
        {
            const double t = static_cast<double>(k) / samples;
            const Eigen::Vector3d p = path[i] + t * (path[i + 1] - path[i]);
            if (!polys[i].contains(p, 1e-7))
            {
                out.push_back({CorridorViolation::Kind::Containment, static_cast<int>(i),
                               "path segment leaves its polyhedron"});
                break;
            }
        }
    }

    for (std::size_t i = 0; i + 1 < polys.size(); ++i)
    {
        if (!interiorPoint(intersect(polys[i], polys[i + 1])))
        {
            out.push_back({CorridorViolation::Kind::Connection, static_cast<int>(i),
                           "consecutive polyhedra have no strict interior point"});
        }
    }

    if (map != nullptr)
    {
        for (std::size_t i = 0; i < polys.size(); ++i)
        {
            for (const auto& pt : map->points())
            {
                if (polys[i].maxViolation(pt) < -1e-9)
                {
                    out.push_back({CorridorViolation::Kind::Safety, static_cast<int>(i),
                                   "cloud point strictly inside polyhedron"});
                    break;
                }
            }
        }
    }
    return out;
}

} // namespace omnitraj

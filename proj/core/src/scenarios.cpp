#include "omnitraj/scenarios.hpp"

#include <cmath>
#include <random>

namespace omnitraj {

namespace {

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

PointCloud makeWallSlotMap(const WallSlotParams& params)
{
    std::vector<Eigen::Vector3d> pts;
    const double halfSlot = 0.5 * params.slotWidth;
    const double x0 = params.wallX - 0.5 * params.thickness;
    const double x1 = params.wallX + 0.5 * params.thickness;
    const auto& b = params.bounds;
    const double h = params.spacing;

    const int ny = static_cast<int>(std::round((b.hi.y() - b.lo.y()) / h));
    const int nz = static_cast<int>(std::round((b.hi.z() - b.lo.z()) / h));
    const int nx = std::max(1, static_cast<int>(std::round(params.thickness / h)));

    // Front and back faces of the wall, minus the slot opening.
    for (double x : {x0, x1})
    {
        for (int iy = 0; iy <= ny; ++iy)
        {
            const double y = b.lo.y() + iy * h;
            if (std::abs(y) < halfSlot)
            {
                continue;
            }
            for (int iz = 0; iz <= nz; ++iz)
            {
                pts.emplace_back(x, y, b.lo.z() + iz * h);
            }
        }
    }
    // Slot side faces through the wall thickness.
    for (double y : {-halfSlot, halfSlot})
    {
        for (int ix = 0; ix <= nx; ++ix)
        {
            const double x = x0 + ix * (params.thickness / nx);
            for (int iz = 0; iz <= nz; ++iz)
            {
                pts.emplace_back(x, y, b.lo.z() + iz * h);
            }
        }
    }
    return PointCloud(std::move(pts), params.bounds);
}

PointCloud makeFloatingObstacleMap(const FloatingObstacleParams& params)
{
    std::mt19937_64 rng(params.seed);
    std::vector<Eigen::Vector3d> pts;
    const auto& b = params.bounds;
    const Eigen::Vector3d ext = b.hi - b.lo;

    for (int o = 0; o < params.obstacles; ++o)
    {
        const Eigen::Vector3d center =
            b.lo + Eigen::Vector3d(uniform01(rng) * ext.x(), uniform01(rng) * ext.y(),
                                   uniform01(rng) * ext.z());
        Eigen::Vector3d half;
        for (int a = 0; a < 3; ++a)
        {
            half(a) = 0.5 * (params.sizeMin +
                             uniform01(rng) * (params.sizeMax - params.sizeMin));
        }
        if ((center - params.start).norm() < params.clearRadius + half.norm() ||
            (center - params.goal).norm() < params.clearRadius + half.norm())
        {
            continue;
        }
        // Sample the cuboid surface: the six faces on a regular grid.
        for (int axis = 0; axis < 3; ++axis)
        {
            const int u = (axis + 1) % 3;
            const int v = (axis + 2) % 3;
            const int nu = std::max(1, static_cast<int>(std::ceil(2.0 * half(u) / params.spacing)));
            const int nv = std::max(1, static_cast<int>(std::ceil(2.0 * half(v) / params.spacing)));
            for (double side : {-1.0, 1.0})
            {
                for (int iu = 0; iu <= nu; ++iu)
                {
                    for (int iv = 0; iv <= nv; ++iv)
                    {
                        Eigen::Vector3d p = center;
                        p(axis) += side * half(axis);
                        p(u) += -half(u) + 2.0 * half(u) * iu / nu;
                        p(v) += -half(v) + 2.0 * half(v) * iv / nv;
                        if (b.contains(p))
                        {
                            pts.push_back(p);
                        }
                    }
                }
            }
        }
    }
    return PointCloud(std::move(pts), params.bounds);
}

} // namespace omnitraj

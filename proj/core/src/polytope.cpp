#include "omnitraj/polytope.hpp"

#include <cmath>

namespace omnitraj {

Polyhedron::Polyhedron(std::vector<Halfspace> halfspaces) : hs_(std::move(halfspaces))
{
    for (auto& h : hs_)
    {
        const double len = h.n.norm();
        if (!(len > 1e-12) || !h.n.allFinite() || !std::isfinite(h.d))
        {
            throw GeometryError("Polyhedron: degenerate halfspace");
        }
        if (std::abs(len - 1.0) > 1e-9)
        {
            h.d /= len;
            h.n /= len;
        }
    }
}

Polyhedron Polyhedron::box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi)
{
    std::vector<Halfspace> hs;
    hs.reserve(6);
    for (int axis = 0; axis < 3; ++axis)
    {
        Eigen::Vector3d n = Eigen::Vector3d::Zero();
        n(axis) = 1.0;
        hs.push_back({n, hi(axis)});
        hs.push_back({-n, -lo(axis)});
    }
    return Polyhedron(std::move(hs));
}

bool Polyhedron::contains(const Eigen::Vector3d& p, double tol) const
{
    for (const auto& h : hs_)
    {
        if (h.n.dot(p) - h.d > tol)
        {
            return false;
        }
    }
    return true;
}

double Polyhedron::maxViolation(const Eigen::Vector3d& p) const
{
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& h : hs_)
    {
        worst = std::max(worst, h.n.dot(p) - h.d);
    }
    return worst;
}

Polyhedron intersect(const Polyhedron& a, const Polyhedron& b)
{
    Polyhedron out = a;
    for (const auto& hb : b.halfspaces())
    {
        bool duplicate = false;
        for (const auto& ha : out.halfspaces())
        {
            if ((ha.n - hb.n).lpNorm<Eigen::Infinity>() <= 1e-9 &&
                std::abs(ha.d - hb.d) <= 1e-9)
            {
                duplicate = true;
                break;
            }
        }
        if (!duplicate)
        {
            out.add(hb);
        }
    }
    return out;
}

std::vector<Eigen::Vector3d> enumerateVertices(const Polyhedron& p)
{
    const auto& hs = p.halfspaces();
    const int k = p.faceCount();
    // Corridor polytopes stay below 60 faces; intersections of two of them
    // can reach twice that.
    if (k > 128)
    {
        throw GeometryError("enumerateVertices: more than 128 faces");
    }

    // Recession test: every axis direction must be blocked by some normal,
    // otherwise the region extends to infinity along it.
    for (int axis = 0; axis < 3; ++axis)
    {
        for (double sign : {1.0, -1.0})
        {
            bool blocked = false;
            for (const auto& h : hs)
            {
                if (sign * h.n(axis) > 1e-9)
                {
                    blocked = true;
                    break;
                }
            }
            if (!blocked)
            {
                throw GeometryError("enumerateVertices: unbounded polyhedron");
            }
        }
    }

    std::vector<Eigen::Vector3d> verts;
    for (int a = 0; a < k; ++a)
    {
        for (int b = a + 1; b < k; ++b)
        {
            for (int c = b + 1; c < k; ++c)
            {
                Eigen::Matrix3d m;
                m.row(0) = hs[a].n;
                m.row(1) = hs[b].n;
                m.row(2) = hs[c].n;
                if (std::abs(m.determinant()) <= 1e-9)
                {
                    continue;
                }
                const Eigen::Vector3d rhs(hs[a].d, hs[b].d, hs[c].d);
                const Eigen::Vector3d x = m.partialPivLu().solve(rhs);
                if (!x.allFinite() || !p.contains(x, 1e-7))
                {
                    continue;
                }
                bool duplicate = false;
                for (const auto& v : verts)
                {
                    if ((v - x).lpNorm<Eigen::Infinity>() <= 1e-6)
                    {
                        duplicate = true;
                        break;
                    }
                }
                if (!duplicate)
                {
                    verts.push_back(x);
                }
            }
        }
    }
    if (verts.empty())
    {
        throw GeometryError("enumerateVertices: empty or degenerate polyhedron");
    }
    return verts;
}

std::optional<Eigen::Vector3d> interiorPoint(const Polyhedron& p)
{
    std::vector<Eigen::Vector3d> verts;
    try
    {
        verts = enumerateVertices(p);
    }
    catch (const GeometryError&)
    {
        return std::nullopt;
    }
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& v : verts)
    {
        centroid += v;
    }
    centroid /= static_cast<double>(verts.size());
    if (p.maxViolation(centroid) < -1e-9)
    {
        return centroid;
    }
    return std::nullopt;
}

VehicleShape VehicleShape::cuboid(double lx, double ly, double lz)
{
    VehicleShape s;
    for (double sx : {-0.5, 0.5})
    {
        for (double sy : {-0.5, 0.5})
        {
            for (double sz : {-0.5, 0.5})
            {
                s.verticesBody.emplace_back(sx * lx, sy * ly, sz * lz);
            }
        }
    }
    return s;
}

std::vector<Eigen::Vector3d> vehicleVerticesWorld(const VehicleShape& shape,
                                                  const Eigen::Vector3d& p,
                                                  const Eigen::Matrix3d& rot)
{
    std::vector<Eigen::Vector3d> out;
    out.reserve(shape.verticesBody.size());
    for (const auto& v : shape.verticesBody)
    {
        out.push_back(p + rot * v);
    }
    return out;
}

} // namespace omnitraj

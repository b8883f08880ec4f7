#ifndef OMNITRAJ_POLYTOPE_HPP
#define OMNITRAJ_POLYTOPE_HPP

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

namespace omnitraj {

// Convex polyhedra in H-representation: P = { p | n_k . p - d_k <= 0 }.
// Normals are kept unit length. All quantities in meters.

struct Halfspace
{
    Eigen::Vector3d n; // outward unit normal
    double d = 0.0;
};

class GeometryError : public std::runtime_error
{
public:
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

class Polyhedron
{
public:
    Polyhedron() = default;
    explicit Polyhedron(std::vector<Halfspace> halfspaces);

    // Axis-aligned box helper.
    static Polyhedron box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi);

    const std::vector<Halfspace>& halfspaces() const { return hs_; }
    int faceCount() const { return static_cast<int>(hs_.size()); }

    bool contains(const Eigen::Vector3d& p, double tol) const;

    // Largest n_k . p - d_k over all faces; <= 0 means inside.
    double maxViolation(const Eigen::Vector3d& p) const;

    void add(const Halfspace& h) { hs_.push_back(h); }

private:
    std::vector<Halfspace> hs_;
};

// Concatenates both halfspace lists, dropping exact duplicates (normal and
// offset both within 1e-9).
Polyhedron intersect(const Polyhedron& a, const Polyhedron& b);

// Brute force over facet triples: solve every well-conditioned 3x3 normal
// system (|det| > 1e-9), keep points satisfying all faces within 1e-7, and
// deduplicate within 1e-6. Throws GeometryError when the polyhedron is
// unbounded (axis recession test) or no vertex survives.
std::vector<Eigen::Vector3d> enumerateVertices(const Polyhedron& p);

// Vertex centroid if strictly interior (margin > 1e-9), otherwise empty.
std::optional<Eigen::Vector3d> interiorPoint(const Polyhedron& p);

struct VehicleShape
{
    std::vector<Eigen::Vector3d> verticesBody;

    // Axis-aligned cuboid centered on the CoM with side lengths lx, ly, lz.
    static VehicleShape cuboid(double lx, double ly, double lz);
};

std::vector<Eigen::Vector3d> vehicleVerticesWorld(const VehicleShape& shape,
                                                  const Eigen::Vector3d& p,
                                                  const Eigen::Matrix3d& rot);

} // namespace omnitraj

#endif

#ifndef OMNITRAJ_CORRIDOR_HPP
#define OMNITRAJ_CORRIDOR_HPP

#include "omnitraj/polytope.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace omnitraj {

// Front end of the pipeline: sample-based path search over a point-cloud map
// and decomposition of the path into a connected safe flight corridor.

struct Aabb
{
    Eigen::Vector3d lo = Eigen::Vector3d::Zero();
    Eigen::Vector3d hi = Eigen::Vector3d::Zero();

    bool contains(const Eigen::Vector3d& p) const
    {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
    void expand(const Eigen::Vector3d& p)
    {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
};

class PointCloud
{
public:
    PointCloud() = default;
    PointCloud(std::vector<Eigen::Vector3d> points, const Aabb& bounds);

    const std::vector<Eigen::Vector3d>& points() const { return points_; }
    const Aabb& bounds() const { return bounds_; }
    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }

    // True when some point lies within radius r of p. Uses a uniform grid.
    bool anyWithin(const Eigen::Vector3d& p, double r) const;

    // Squared distance to the nearest point, +inf for an empty cloud.
    double nearestSquaredDistance(const Eigen::Vector3d& p) const;

private:
    void buildIndex();
    std::int64_t cellKey(int ix, int iy, int iz) const;

    std::vector<Eigen::Vector3d> points_;
    Aabb bounds_;
    double cell_ = 0.5;
    Eigen::Vector3i dims_ = Eigen::Vector3i::Zero();
    std::vector<std::vector<int>> grid_;
};

using Path = std::vector<Eigen::Vector3d>;

struct RrtConfig
{
    std::uint64_t seed = 1;
    double step = 0.3;
    double goalBias = 0.1;
    int maxIterations = 200000;
    double goalTol = 0.3;
    double sphereRadius = 0.21; // inscribed-sphere collision radius
};

struct SfcConfig
{
    double margin = 2.0; // box inflation around each path segment, meters
    int maxFaces = 40;
    // Segments longer than this are subdivided before decomposition; a
    // narrow gap then tightens only the polytopes near it instead of the
    // whole corridor.
    double maxSegment = 1.0;
};

class NoPathError : public std::runtime_error
{
public:
    NoPathError(const std::string& what, int explored)
        : std::runtime_error(what), nodesExplored(explored) {}
    int nodesExplored = 0;
};

class SfcError : public std::runtime_error
{
public:
    SfcError(const std::string& what, int segment)
        : std::runtime_error(what), segmentIndex(segment) {}
    int segmentIndex = 0;
};

// True when every sample of the segment (spacing <= sphereRadius / 4) keeps
// clearance >= r from the cloud.
bool segmentClear(const PointCloud& map, const Eigen::Vector3d& a,
                  const Eigen::Vector3d& b, double r);

// Position-space RRT with inscribed-sphere collision. Deterministic for a
// fixed seed. Throws NoPathError when the iteration budget runs out,
// std::invalid_argument when an endpoint is out of bounds or in collision.
Path rrtSearch(const PointCloud& map, const Eigen::Vector3d& start,
               const Eigen::Vector3d& goal, const RrtConfig& cfg);

// Greedy shortcutting: replaces spans of waypoints by straight segments that
// keep clearance >= r. Never increases the waypoint count.
Path shortcut(const Path& path, const PointCloud& map, double r);

struct Corridor
{
    std::vector<Polyhedron> polys; // one per path segment
    Path path;
};

// Per segment: start from the bounds box clipped to the margin-inflated
// segment box, then repeatedly cut away the interior cloud point closest to
// the segment with a plane tangent to it, until no point remains strictly
// inside or the face budget is hit (then SfcError).
Corridor decompose(const Path& path, const PointCloud& map, const SfcConfig& cfg);

struct CorridorViolation
{
    enum class Kind
    {
        Connection, // consecutive polys do not share a strict interior point
        Containment, // path segment leaves its polyhedron
        Safety,     // a cloud point lies strictly inside a polyhedron
    };
    Kind kind;
    int index = 0;
    std::string detail;
};

// Empty result iff the corridor invariants hold; the cloud check runs only
// when a map is supplied.
std::vector<CorridorViolation> validate(const Corridor& corridor,
                                        const PointCloud* map = nullptr);

} // namespace omnitraj

#endif

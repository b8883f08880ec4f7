#ifndef OMNITRAJ_SERIALIZE_HPP
#define OMNITRAJ_SERIALIZE_HPP

#include "omnitraj/corridor.hpp"
#include "omnitraj/flatness.hpp"
#include "omnitraj/minco.hpp"
#include "omnitraj/optimizer.hpp"
#include "omnitraj/simtrack.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace omnitraj {

// File formats. JSON artifacts round-trip byte-identically: parsing and
// re-serializing a written file reproduces it exactly.

class ConfigError : public std::runtime_error
{
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Trajectory JSON: {"s":4,"pieces":[{"T":...,"coeffs":[[6 values] x 2s]}]},
// monomial basis, ascending degree, local time.
std::string trajectoryToJson(const Trajectory& traj);
Trajectory trajectoryFromJson(const std::string& text);

// Polyhedron JSON: {"halfspaces":[{"n":[x,y,z],"d":v},...]}, unit normals.
std::string polyhedronToJson(const Polyhedron& poly);
Polyhedron polyhedronFromJson(const std::string& text);

// Corridor JSON: {"polys":[...],"path":[[x,y,z],...]}.
std::string corridorToJson(const Corridor& corridor);
Corridor corridorFromJson(const std::string& text);

std::string pathToJson(const Path& path);
Path pathFromJson(const std::string& text);

// Point cloud CSV: "x,y,z" per line, header optional on read.
std::vector<Eigen::Vector3d> loadCloudCsv(const std::string& file);
void saveCloudCsv(const std::string& file, const std::vector<Eigen::Vector3d>& points);

void writeProfileCsv(const std::string& file, const std::vector<ProfileRow>& rows);
void writeTrackLogCsv(const std::string& file, const std::vector<TrackLogRow>& rows);

// One flat JSON config drives a full pipeline run. Unknown keys are rejected
// with the offending key named. Defaults match the reference optimization
// settings (kappa=16, v_max=0.6, a_max=2.0, omega_max=0.5, W=1e5, k_rho=10).
struct PlanConfig
{
    std::string mapFile;
    std::optional<Aabb> bounds; // defaults to padded cloud/endpoint extent
    Pose start;
    Pose goal;
    Limits limits;
    PenaltyWeights weights;
    int s = 4;
    double dPiece = 1.0;
    RrtConfig rrt;
    bool rrtRadiusSet = false; // r_sphere defaults to lz/2 unless given
    SfcConfig sfc;
    LbfgsSettings lbfgs;
    double shapeLx = 1.1;
    double shapeLy = 1.1;
    double shapeLz = 0.42;
    Gains gains;
    InertiaParams inertia;
};

PlanConfig defaultPlanConfig();
PlanConfig planConfigFromJson(const std::string& text);
PlanConfig planConfigFromFile(const std::string& file);
std::string planConfigToJson(const PlanConfig& config);

std::string readFile(const std::string& file);
void writeFile(const std::string& file, const std::string& content);

} // namespace omnitraj

#endif

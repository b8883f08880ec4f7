#ifndef OMNITRAJ_OPTIMIZER_HPP
#define OMNITRAJ_OPTIMIZER_HPP

#include "omnitraj/corridor.hpp"
#include "omnitraj/costs.hpp"
#include "omnitraj/lbfgs.hpp"
#include "omnitraj/minco.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace omnitraj {

// Unconstrained reformulation of the corridor-constrained problem. Durations
// are parameterized as T = exp(tau); position waypoints as smooth convex
// combinations of their polytope's vertices; attitude waypoints are free.
// The composite objective is minimized with L-BFGS.

struct Pose
{
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Quaterniond attitude = Eigen::Quaterniond(1.0, 0.0, 0.0, 0.0);
};

struct ProblemSpec
{
    Corridor corridor;
    VehicleShape shape = VehicleShape::cuboid(1.1, 1.1, 0.42);
    Pose start;
    Pose goal;
    Limits limits;
    PenaltyWeights weights;
    int s = 4;
    double dPiece = 1.0; // target piece length, meters
    LbfgsSettings solver;
};

struct PieceAllocation
{
    int pieces = 0;                       // M
    std::vector<int> pieceToPoly;         // size M
    std::vector<int> intersectionWaypoints; // k_1 < ... < k_{Mp-1}, 1-based
    // Vertex set parameterizing each interior waypoint (size M-1): the
    // containing polytope's vertices, or those of P_i cap P_{i+1} for
    // intersection waypoints.
    std::vector<std::vector<Eigen::Vector3d>> waypointVertices;
    std::vector<double> pieceShareLength; // per piece, for time initialization
};

PieceAllocation allocatePieces(const Corridor& corridor, double dPiece);

// T_i = exp(tau_i); jacobian is T itself. Throws std::domain_error when
// |tau| > 30.
Eigen::VectorXd forwardT(const Eigen::VectorXd& tau);

// q^p = sum_j w_j v_j with w_j = (xi_j^2 + 1) / sum_m (xi_m^2 + 1); always
// strictly interior for full-dimensional vertex sets. jacobian(:, k) is
// dq^p / dxi_k.
struct WaypointMap
{
    Eigen::Vector3d point;
    Eigen::MatrixXd jacobian; // 3 x vertexCount
};
WaypointMap forwardQp(const Eigen::VectorXd& xi,
                      const std::vector<Eigen::Vector3d>& vertices);

struct DecisionVars
{
    std::vector<Eigen::VectorXd> xi; // one block per interior waypoint
    Eigen::MatrixXd qSigma;          // 3 x (M-1)
    Eigen::VectorXd tau;             // M

    Eigen::VectorXd pack() const;
    static DecisionVars unpack(const Eigen::VectorXd& x, const PieceAllocation& alloc);
    static int dimension(const PieceAllocation& alloc);
};

DecisionVars initialize(const ProblemSpec& spec, const PieceAllocation& alloc);

// Value and gradient of the full softened objective at the decision vars.
double objective(const Eigen::VectorXd& x, const ProblemSpec& spec,
                 const PieceAllocation& alloc, MincoSystem& system,
                 Eigen::VectorXd& grad);

struct SolveReport
{
    int iterations = 0;
    int evaluations = 0;
    double optimizeSeconds = 0.0;
    double finalCost = 0.0;
    std::string termination;
    bool success = false;
    // Max sampled violation per constraint family at 4*kappa samples/piece.
    double velocityViolation = 0.0;  // m/s over vMax
    double accelViolation = 0.0;     // m/s^2 over aMax
    double omegaViolation = 0.0;     // rad/s over omegaMax
    double corridorViolation = 0.0;  // meters outside the assigned polytope
    int pieces = 0;
    int skippedUpdates = 0;
};

struct SolveResult
{
    Trajectory trajectory;
    SolveReport report;
    PieceAllocation allocation;
};

SolveResult solve(const ProblemSpec& spec);

// Violation summary used by both solve() and the check tool.
void measureViolations(const Trajectory& traj, const ProblemSpec& spec,
                       const PieceAllocation& alloc, int samplesPerPiece,
                       SolveReport& report);

} // namespace omnitraj

#endif

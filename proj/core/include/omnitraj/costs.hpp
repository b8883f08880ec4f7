#ifndef OMNITRAJ_COSTS_HPP
#define OMNITRAJ_COSTS_HPP

#include "omnitraj/minco.hpp"
#include "omnitraj/polytope.hpp"

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace omnitraj {

// Objective terms of the softened trajectory problem: time-regularized
// control-effort energy plus sampled hinge-cubic penalties for velocity,
// acceleration, body rate, and whole-body corridor containment. Every term
// returns its value together with analytic partials w.r.t. the stacked piece
// coefficients and the durations.

struct Limits
{
    double vMax = 0.6;     // m/s
    double aMax = 2.0;     // m/s^2
    double omegaMax = 0.5; // rad/s
};

struct PenaltyWeights
{
    double wV = 1e5;
    double wA = 1e5;
    double wOmega = 1e5;
    double wCorridor = 1e5;
    double kRho = 10.0; // time regularization
    int kappa = 16;     // samples per piece
};

struct CostGradients
{
    double value = 0.0;
    Eigen::MatrixXd dCoeffs; // (2sM) x 6 stacked
    Eigen::VectorXd dTimes;  // M

    void setZero(int s, int pieces);
    CostGradients& operator+=(const CostGradients& other);
};

// (max(x,0)^3, 3 max(x,0)^2): a C^2 softening of an inequality violation.
std::pair<double, double> hingeCubic(double x);

// Integral of ||z^(s)||^2 plus kRho * sum(T). The Gram matrix of beta^(s) is
// closed-form in the monomial basis.
CostGradients smoothnessEnergy(const Trajectory& traj, double kRho);

CostGradients kinodynamicPenalties(const Trajectory& traj,
                                   const Limits& limits,
                                   const PenaltyWeights& weights);

// pieceToPoly maps each piece to its containing corridor polyhedron.
CostGradients corridorPenalty(const Trajectory& traj,
                              std::span<const int> pieceToPoly,
                              std::span<const Polyhedron> polys,
                              const VehicleShape& shape,
                              const PenaltyWeights& weights);

CostGradients totalCost(const Trajectory& traj,
                        const Limits& limits,
                        const PenaltyWeights& weights,
                        std::span<const int> pieceToPoly,
                        std::span<const Polyhedron> polys,
                        const VehicleShape& shape);

} // namespace omnitraj

#endif

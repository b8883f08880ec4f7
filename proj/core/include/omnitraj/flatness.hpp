#ifndef OMNITRAJ_FLATNESS_HPP
#define OMNITRAJ_FLATNESS_HPP

#include "omnitraj/minco.hpp"

#include <Eigen/Dense>

#include <vector>

namespace omnitraj {

// Differential-flatness maps: the full rigid-body state and the body wrench
// are algebraic functions of the flat output z = (p, sigma) and its
// derivatives.

struct FullState
{
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    Eigen::Quaterniond q = Eigen::Quaterniond(1.0, 0.0, 0.0, 0.0);
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    Eigen::Vector3d omega = Eigen::Vector3d::Zero(); // world frame
};

struct ControlInput
{
    Eigen::Vector3d forceBody = Eigen::Vector3d::Zero();  // N
    Eigen::Vector3d torqueBody = Eigen::Vector3d::Zero(); // N m
};

struct InertiaParams
{
    double mass = 4.0;                                       // kg
    Eigen::Matrix3d inertiaBody =
        Eigen::Vector3d(0.08, 0.08, 0.14).asDiagonal();      // kg m^2
    Eigen::Vector3d gravity = Eigen::Vector3d(0.0, 0.0, -9.8); // m/s^2
};

FullState stateMap(const Eigen::Matrix<double, 6, 1>& z,
                   const Eigen::Matrix<double, 6, 1>& zDot);

// f_b = m R^T (pddot - g); tau_b = R^T (omega^ J omega + J omega_dot) with
// the world-frame inertia J = R J_b R^T.
ControlInput inputMap(const Eigen::Matrix<double, 6, 1>& z,
                      const Eigen::Matrix<double, 6, 1>& zDot,
                      const Eigen::Matrix<double, 6, 1>& zDdot,
                      const InertiaParams& params);

struct ProfileRow
{
    double t = 0.0;
    Eigen::Vector3d p;
    Eigen::Quaterniond q;
    Eigen::Vector3d v;
    Eigen::Vector3d omega;
    Eigen::Vector3d a;
    Eigen::Vector3d forceBody;
    Eigen::Vector3d torqueBody;
    double vNorm = 0.0;
    double aNorm = 0.0;
    double omegaNorm = 0.0;
};

// Rows at t = 0, dt, 2dt, ..., up to floor(total/dt)*dt.
std::vector<ProfileRow> sampleProfile(const Trajectory& traj, double dt,
                                      const InertiaParams& params);

} // namespace omnitraj

#endif

#include "omnitraj/flatness.hpp"

#include "omnitraj/rotation.hpp"

#include <cmath>
#include <stdexcept>

namespace omnitraj {

FullState stateMap(const Eigen::Matrix<double, 6, 1>& z,
                   const Eigen::Matrix<double, 6, 1>& zDot)
{
    FullState x;
    x.p = z.head<3>();
    x.v = zDot.head<3>();
    const AttitudeDerivs ad = attitudeDerivs(z.tail<3>());
    x.q = ad.q;
    x.omega = angularVelocity(ad, zDot.tail<3>());
    return x;
}

ControlInput inputMap(const Eigen::Matrix<double, 6, 1>& z,
                      const Eigen::Matrix<double, 6, 1>& zDot,
                      const Eigen::Matrix<double, 6, 1>& zDdot,
                      const InertiaParams& params)
{
    const AttitudeDerivs ad = attitudeDerivs(z.tail<3>());
    const Eigen::Vector3d omega = angularVelocity(ad, zDot.tail<3>());
    const Eigen::Vector3d omegaDot =
        angularAcceleration(ad, zDot.tail<3>(), zDdot.tail<3>());
    const Eigen::Matrix3d inertiaWorld =
        ad.rot * params.inertiaBody * ad.rot.transpose();

    ControlInput u;
    u.forceBody = params.mass * ad.rot.transpose() * (zDdot.head<3>() - params.gravity);
    u.torqueBody = ad.rot.transpose() *
                   (omega.cross(inertiaWorld * omega) + inertiaWorld * omegaDot);
    return u;
}

std::vector<ProfileRow> sampleProfile(const Trajectory& traj, double dt,
                                      const InertiaParams& params)
{
    if (!(dt > 0.0))
    {
        throw std::invalid_argument("sampleProfile: dt must be positive");
    }
    const double total = traj.totalDuration();
    const int rows = static_cast<int>(std::floor(total / dt)) + 1;
    std::vector<ProfileRow> out;
    out.reserve(rows);
    for (int i = 0; i < rows; ++i)
    {
        const double t = std::min(i * dt, total);
        const auto z = traj.eval(t, 0);
        const auto zDot = traj.eval(t, 1);
        const auto zDdot = traj.eval(t, 2);
        const FullState x = stateMap(z, zDot);
        const ControlInput u = inputMap(z, zDot, zDdot, params);

        ProfileRow row;
        row.t = t;
        row.p = x.p;
        row.q = x.q;
        row.v = x.v;
        row.omega = x.omega;
        row.a = zDdot.head<3>();
        row.forceBody = u.forceBody;
        row.torqueBody = u.torqueBody;
        row.vNorm = x.v.norm();
        row.aNorm = row.a.norm();
        row.omegaNorm = x.omega.norm();
        out.push_back(row);
    }
    return out;
}

} // namespace omnitraj

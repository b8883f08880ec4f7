#include "omnitraj/flatness.hpp"

#include "omnitraj/rotation.hpp"
#include "omnitraj/simtrack.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace omnitraj;
using testutil::randomVec;

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 makeZ(const Eigen::Vector3d& p, const Eigen::Vector3d& sigma)
{
    Vec6 z;
    z.head<3>() = p;
    z.tail<3>() = sigma;
    return z;
}

Trajectory randomSmoothTrajectory(std::mt19937_64& rng, int m)
{
    Eigen::MatrixXd q(6, m - 1);
    for (int c = 0; c < q.cols(); ++c)
    {
        q.col(c).head<3>() = randomVec(rng, -1.0, 1.0);
        q.col(c).tail<3>() = randomVec(rng, -0.4, 0.4);
    }
    Eigen::VectorXd T(m);
    for (int i = 0; i < m; ++i)
    {
        T(i) = testutil::uniform(rng, 0.8, 1.4);
    }
    BoundaryCondition bc0, bc1;
    bc0.derivs.setZero(4, 6);
    bc1.derivs.setZero(4, 6);
    bc1.derivs.row(0).head<3>() = randomVec(rng, -1.0, 1.0).transpose();
    return constructTrajectory(q, T, bc0, bc1, 4);
}

} // namespace

TEST_CASE("state map")
{
    const FullState rest = stateMap(makeZ({1.0, 2.0, 3.0}, Eigen::Vector3d::Zero()),
                                    Vec6::Zero());
    CHECK((rest.p - Eigen::Vector3d(1.0, 2.0, 3.0)).norm() == doctest::Approx(0.0));
    CHECK(rest.q.w() == doctest::Approx(-1.0));
    CHECK(rest.v.norm() == doctest::Approx(0.0));
    CHECK(rest.omega.norm() == doctest::Approx(0.0));

    Vec6 zDot = Vec6::Zero();
    zDot.tail<3>() = Eigen::Vector3d(0.25, 0.0, 0.0);
    const FullState spinning = stateMap(makeZ(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()), zDot);
    CHECK((spinning.omega - Eigen::Vector3d(-1.0, 0.0, 0.0)).norm() ==
          doctest::Approx(0.0));

    std::mt19937_64 rng(107);
    for (int i = 0; i < 100; ++i)
    {
        Vec6 z, zd;
        z.head<3>() = randomVec(rng, -2.0, 2.0);
        z.tail<3>() = randomVec(rng, -2.0, 2.0);
        zd.head<3>() = randomVec(rng, -2.0, 2.0);
        zd.tail<3>() = randomVec(rng, -2.0, 2.0);
        CHECK(std::abs(stateMap(z, zd).q.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("input map")
{
    InertiaParams unit;
    unit.mass = 1.0;
    unit.inertiaBody = Eigen::Matrix3d::Identity();

    const ControlInput hover =
        inputMap(Vec6::Zero(), Vec6::Zero(), Vec6::Zero(), unit);
    CHECK((hover.forceBody - Eigen::Vector3d(0.0, 0.0, 9.8)).norm() ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hover.torqueBody.norm() == doctest::Approx(0.0));

    InertiaParams heavy = unit;
    heavy.mass = 2.0;
    Vec6 zDdot = Vec6::Zero();
    zDdot.head<3>() = Eigen::Vector3d(0.0, 0.0, 1.2);
    const ControlInput lift = inputMap(Vec6::Zero(), Vec6::Zero(), zDdot, heavy);
    CHECK((lift.forceBody - Eigen::Vector3d(0.0, 0.0, 22.0)).norm() ==
          doctest::Approx(0.0).epsilon(1e-12));

    // Constant spin about an inertia eigenaxis needs no torque: pick
    // sigma_ddot so the angular acceleration vanishes.
    InertiaParams hex;
    hex.mass = 4.0;
    hex.inertiaBody = Eigen::Vector3d(0.08, 0.08, 0.14).asDiagonal();
    const Eigen::Vector3d sigma = Eigen::Vector3d::Zero();
    const Eigen::Vector3d sigmaDot(0.0, 0.0, -0.25); // omega = (0,0,1)
    const OmegaPartials parts = omegaPartials(sigma, sigmaDot);
    const Eigen::Vector3d sigmaDdot =
        -parts.dSigmaDot.inverse() * (parts.dSigma * sigmaDot);
    CHECK(angularAcceleration(sigma, sigmaDot, sigmaDdot).norm() < 1e-12);

    Vec6 z = Vec6::Zero(), zd = Vec6::Zero(), zdd = Vec6::Zero();
    zd.tail<3>() = sigmaDot;
    zdd.tail<3>() = sigmaDdot;
    const ControlInput spin = inputMap(z, zd, zdd, hex);
    CHECK(spin.torqueBody.norm() < 1e-12);
}

TEST_CASE("torque is invariant under translation")
{
    std::mt19937_64 rng(109);
    InertiaParams params;
    for (int i = 0; i < 20; ++i)
    {
        Vec6 z, zd, zdd;
        z.head<3>() = randomVec(rng, -2.0, 2.0);
        z.tail<3>() = randomVec(rng, -1.0, 1.0);
        zd.head<3>() = randomVec(rng, -1.0, 1.0);
        zd.tail<3>() = randomVec(rng, -1.0, 1.0);
        zdd.head<3>() = randomVec(rng, -1.0, 1.0);
        zdd.tail<3>() = randomVec(rng, -1.0, 1.0);

        Vec6 zShift = z;
        zShift.head<3>() += Eigen::Vector3d(5.0, -3.0, 2.0);
        const ControlInput a = inputMap(z, zd, zdd, params);
        const ControlInput b = inputMap(zShift, zd, zdd, params);
        CHECK((a.torqueBody - b.torqueBody).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("profile sampling")
{
    InertiaParams params;
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(8, 6);
    coeffs.row(0) << 1.0, 2.0, 3.0, 0.1, -0.2, 0.3;
    const Trajectory still(4, Eigen::VectorXd::Constant(1, 2.0), coeffs);

    const auto rows = sampleProfile(still, 0.01, params);
    CHECK(rows.size() == 201); // floor(2 / 0.01) + 1
    for (const auto& r : rows)
    {
        CHECK(r.vNorm == 0.0);
        CHECK(r.omegaNorm == 0.0);
        CHECK(r.aNorm == 0.0);
    }

    std::mt19937_64 rng(113);
    const Trajectory traj = randomSmoothTrajectory(rng, 3);
    const double dt = 0.01;
    const auto profile = sampleProfile(traj, dt, params);

    double maxProfile = 0.0;
    for (const auto& r : profile)
    {
        maxProfile = std::max(maxProfile, r.vNorm);
    }
    // Dense search at 10x resolution can beat the profile only within the
    // local variation over one dt.
    double maxDense = 0.0;
    for (double t = 0.0; t <= traj.totalDuration(); t += dt / 10.0)
    {
        maxDense = std::max(maxDense, traj.eval(t, 1).head<3>().norm());
    }
    CHECK(maxDense >= maxProfile - 1e-12);
    CHECK(maxDense - maxProfile < 0.05 * std::max(1.0, maxDense));
}

TEST_CASE("open-loop replay of the flatness inputs reproduces the trajectory")
{
    std::mt19937_64 rng(127);
    InertiaParams params;
    for (int trial = 0; trial < 3; ++trial)
    {
        const Trajectory traj = randomSmoothTrajectory(rng, 3);
        const double horizon = std::min(2.0, traj.totalDuration());
        const double dt = 1e-4;
        const int steps = static_cast<int>(horizon / dt);

        FullState state = stateMap(traj.eval(0.0, 0), traj.eval(0.0, 1));
        for (int k = 0; k < steps; ++k)
        {
            const double t = k * dt;
            // Wrench held over the step, sampled at the midpoint.
            const double tm = t + 0.5 * dt;
            const ControlInput u =
                inputMap(traj.eval(tm, 0), traj.eval(tm, 1), traj.eval(tm, 2), params);
            state = rigidBodyStep(state, u, params, dt);
        }
        const double tEnd = steps * dt;
        const Eigen::Vector3d pRef = traj.eval(tEnd, 0).head<3>();
        const Eigen::Quaterniond qRef = quatFromRotvec(traj.eval(tEnd, 0).tail<3>());
        CHECK((state.p - pRef).norm() < 1e-3);
        CHECK(geodesicError(qRef, state.q) < 0.5 * M_PI / 180.0);
    }
}

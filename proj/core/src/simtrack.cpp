#include "omnitraj/simtrack.hpp"

#include "omnitraj/rotation.hpp"

#include <cmath>

namespace omnitraj {

namespace {

Eigen::Vector3d clampAbs(const Eigen::Vector3d& v, double limit)
{
    return v.cwiseMax(-limit).cwiseMin(limit);
}

} // namespace

Eigen::Vector3d outerPositionControl(const Eigen::Vector3d& pRef,
                                     const Eigen::Vector3d& pFdb,
                                     const Eigen::Vector3d& vRef,
                                     const Eigen::Vector3d& vFdb,
                                     const Eigen::Vector3d& aRef,
                                     ControllerState& state,
                                     const Gains& gains, double dt)
{
    const Eigen::Vector3d vSp = gains.kPosP.cwiseProduct(pRef - pFdb) + vRef;
    const Eigen::Vector3d eV = vSp - vFdb;
    const Eigen::Vector3d prev = state.primed ? state.prevVelError : eV;
    state.velIntegral =
        clampAbs(state.velIntegral + 0.5 * dt * (eV + prev), gains.integratorLimit);
    const Eigen::Vector3d dEv = (eV - prev) / dt;
    state.prevVelError = eV;

    return gains.kVelP.cwiseProduct(eV) + gains.kVelI.cwiseProduct(state.velIntegral) +
           gains.kVelD.cwiseProduct(dEv) + gains.kVelF.cwiseProduct(aRef);
}

Eigen::Vector3d attitudeRateControl(const Eigen::Quaterniond& qRef,
                                    const Eigen::Quaterniond& qFdb,
                                    const Eigen::Vector3d& omegaBodyRef,
                                    const Eigen::Vector3d& omegaBodyFdb,
                                    const Eigen::Vector3d& omegaDotBodyRef,
                                    ControllerState& state,
                                    const Gains& gains, double dt)
{
    const Eigen::Quaterniond eQ = qRef * qFdb.inverse();
    const double sign = eQ.w() >= 0.0 ? 1.0 : -1.0;
    const Eigen::Vector3d omegaSp =
        sign * gains.kAttP.cwiseProduct(eQ.vec()) + omegaBodyRef;

    const Eigen::Vector3d eW = omegaSp - omegaBodyFdb;
    const Eigen::Vector3d prev = state.primed ? state.prevRateError : eW;
    state.rateIntegral =
        clampAbs(state.rateIntegral + 0.5 * dt * (eW + prev), gains.integratorLimit);
    const Eigen::Vector3d dEw = (eW - prev) / dt;
    state.prevRateError = eW;

    return gains.kRateP.cwiseProduct(eW) + gains.kRateI.cwiseProduct(state.rateIntegral) +
           gains.kRateD.cwiseProduct(dEw) + gains.kRateF.cwiseProduct(omegaDotBodyRef);
}

ControlInput wrenchCommand(const Eigen::Vector3d& aSp,
                           const Eigen::Vector3d& omegaDotSp,
                           const Eigen::Quaterniond& qFdb,
                           const Eigen::Vector3d& omegaBodyFdb,
                           const InertiaParams& params,
                           const Gains& gains)
{
    ControlInput u;
    const Eigen::Matrix3d rot = qFdb.toRotationMatrix();
    u.forceBody = params.mass * rot.transpose() * (aSp - params.gravity);
    u.torqueBody = params.inertiaBody * omegaDotSp + gains.comOffset.cross(u.forceBody) +
                   omegaBodyFdb.cross(params.inertiaBody * omegaBodyFdb);
    return u;
}

FullState rigidBodyStep(const FullState& state, const ControlInput& u,
                        const InertiaParams& params, double dt)
{
    if (!(dt > 0.0) || dt > 1e-2)
    {
        throw std::invalid_argument("rigidBodyStep: dt must lie in (0, 1e-2]");
    }

    struct Deriv
    {
        Eigen::Vector3d dp;
        Eigen::Vector3d dv;
        Eigen::Vector4d dq;
        Eigen::Vector3d dw;
    };
    auto dynamics = [&](const Eigen::Vector3d& /*p*/, const Eigen::Vector3d& v,
                        const Eigen::Vector4d& q, const Eigen::Vector3d& w) -> Deriv
    {
        const Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));
        const Eigen::Matrix3d rot = quat.toRotationMatrix();
        const Eigen::Matrix3d inertiaWorld = rot * params.inertiaBody * rot.transpose();

        Deriv d;
        d.dp = v;
        d.dv = params.gravity + rot * u.forceBody / params.mass;
        const Eigen::Quaterniond omegaQuat(0.0, w.x(), w.y(), w.z());
        const Eigen::Quaterniond qDot = omegaQuat * quat;
        d.dq = 0.5 * Eigen::Vector4d(qDot.w(), qDot.x(), qDot.y(), qDot.z());
        d.dw = inertiaWorld.inverse() *
               (rot * u.torqueBody - w.cross(inertiaWorld * w));
        return d;
    };

    const Eigen::Vector4d q0(state.q.w(), state.q.x(), state.q.y(), state.q.z());
    const Deriv k1 = dynamics(state.p, state.v, q0, state.omega);
    const Deriv k2 = dynamics(state.p + 0.5 * dt * k1.dp, state.v + 0.5 * dt * k1.dv,
                              q0 + 0.5 * dt * k1.dq, state.omega + 0.5 * dt * k1.dw);
    const Deriv k3 = dynamics(state.p + 0.5 * dt * k2.dp, state.v + 0.5 * dt * k2.dv,
                              q0 + 0.5 * dt * k2.dq, state.omega + 0.5 * dt * k2.dw);
    const Deriv k4 = dynamics(state.p + dt * k3.dp, state.v + dt * k3.dv,
                              q0 + dt * k3.dq, state.omega + dt * k3.dw);

    FullState next;
    next.p = state.p + dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    next.v = state.v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    const Eigen::Vector4d q =
        q0 + dt / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    next.q = Eigen::Quaterniond(q(0), q(1), q(2), q(3)).normalized();
    next.omega =
        state.omega + dt / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
    return next;
}

double geodesicError(const Eigen::Quaterniond& qRef, const Eigen::Quaterniond& qAct)
{
    const Eigen::Matrix3d rel =
        qRef.toRotationMatrix().transpose() * qAct.toRotationMatrix();
    const double c = std::clamp(0.5 * (rel.trace() - 1.0), -1.0, 1.0);
    return std::acos(c);
}

TrackResult track(const Trajectory& traj, const Gains& gains,
                  const InertiaParams& params, double dt, const FullState* initial)
{
    const double total = traj.totalDuration();
    const int steps = static_cast<int>(std::floor(total / dt));

    const auto z0 = traj.eval(0.0, 0);
    const auto z0Dot = traj.eval(0.0, 1);
    FullState state = initial != nullptr ? *initial : stateMap(z0, z0Dot);

    ControllerState ctrl;
    TrackResult result;
    result.log.reserve(steps + 1);
    double sumSq = 0.0;

    for (int k = 0; k <= steps; ++k)
    {
        const double t = std::min(k * dt, total);
        const auto z = traj.eval(t, 0);
        const auto zDot = traj.eval(t, 1);
        const auto zDdot = traj.eval(t, 2);
        const FullState ref = stateMap(z, zDot);
        const Eigen::Matrix3d rotRef = ref.q.toRotationMatrix();
        const Eigen::Vector3d aRef = zDdot.head<3>();
        const Eigen::Vector3d omegaBodyRef = rotRef.transpose() * ref.omega;
        const Eigen::Vector3d omegaDotRef =
            angularAcceleration(z.tail<3>(), zDot.tail<3>(), zDdot.tail<3>());
        const Eigen::Vector3d omegaDotBodyRef = rotRef.transpose() * omegaDotRef;

        const Eigen::Vector3d omegaBodyFdb =
            state.q.toRotationMatrix().transpose() * state.omega;

        const Eigen::Vector3d aSp = outerPositionControl(
            ref.p, state.p, ref.v, state.v, aRef, ctrl, gains, dt);
        const Eigen::Vector3d omegaDotSp = attitudeRateControl(
            ref.q, state.q, omegaBodyRef, omegaBodyFdb, omegaDotBodyRef, ctrl, gains, dt);
        ctrl.primed = true;

        const ControlInput u =
            wrenchCommand(aSp, omegaDotSp, state.q, omegaBodyFdb, params, gains);

        TrackLogRow row;
        row.t = t;
        row.pRef = ref.p;
        row.qRef = ref.q;
        row.pAct = state.p;
        row.qAct = state.q;
        row.posError = ref.p - state.p;
        row.attError = geodesicError(ref.q, state.q);
        row.forceBody = u.forceBody;
        row.torqueBody = u.torqueBody;
        result.log.push_back(row);

        const double ePos = row.posError.norm();
        sumSq += ePos * ePos;
        result.maxPosError = std::max(result.maxPosError, ePos);
        result.maxAttError = std::max(result.maxAttError, row.attError);
        if (ePos > 5.0)
        {
            result.diverged = true;
            result.rmsPosError = std::sqrt(sumSq / result.log.size());
            throw DivergenceError("track: position error exceeded 5 m", result);
        }

        if (k < steps)
        {
            state = rigidBodyStep(state, u, params, dt);
        }
    }
    result.rmsPosError = std::sqrt(sumSq / result.log.size());
    return result;
}

} // namespace omnitraj

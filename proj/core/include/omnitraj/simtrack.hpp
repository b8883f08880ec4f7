#ifndef OMNITRAJ_SIMTRACK_HPP
#define OMNITRAJ_SIMTRACK_HPP

#include "omnitraj/flatness.hpp"
#include "omnitraj/minco.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace omnitraj {

// Closed-loop verification: a rigid-body integrator plus the cascade PID
// controller tracking a trajectory at the wrench level. Rotor allocation is
// out of scope; the commanded body wrench is applied directly.

struct Gains
{
    Eigen::Vector3d kPosP = Eigen::Vector3d::Constant(2.0);
    Eigen::Vector3d kVelP = Eigen::Vector3d::Constant(4.0);
    Eigen::Vector3d kVelI = Eigen::Vector3d::Constant(0.4);
    Eigen::Vector3d kVelD = Eigen::Vector3d::Zero();
    Eigen::Vector3d kVelF = Eigen::Vector3d::Constant(1.0);
    Eigen::Vector3d kAttP = Eigen::Vector3d::Constant(4.0);
    Eigen::Vector3d kRateP = Eigen::Vector3d::Constant(8.0);
    Eigen::Vector3d kRateI = Eigen::Vector3d::Constant(0.5);
    Eigen::Vector3d kRateD = Eigen::Vector3d::Zero();
    Eigen::Vector3d kRateF = Eigen::Vector3d::Constant(1.0);
    Eigen::Vector3d comOffset = Eigen::Vector3d::Zero(); // meters, body frame
    double integratorLimit = 2.0;
};

// Integrator and derivative memory of both loops.
struct ControllerState
{
    Eigen::Vector3d velIntegral = Eigen::Vector3d::Zero();
    Eigen::Vector3d rateIntegral = Eigen::Vector3d::Zero();
    Eigen::Vector3d prevVelError = Eigen::Vector3d::Zero();
    Eigen::Vector3d prevRateError = Eigen::Vector3d::Zero();
    bool primed = false;
};

// Velocity setpoint is K_{P,p} e_p plus the reference velocity; the
// feed-forward gain multiplies the reference acceleration (the quantity this
// loop commands). Trapezoidal integral with clamping, backward-difference
// derivative.
Eigen::Vector3d outerPositionControl(const Eigen::Vector3d& pRef,
                                     const Eigen::Vector3d& pFdb,
                                     const Eigen::Vector3d& vRef,
                                     const Eigen::Vector3d& vFdb,
                                     const Eigen::Vector3d& aRef,
                                     ControllerState& state,
                                     const Gains& gains, double dt);

// e_Q = Q_ref x Q_fdb^-1; the rate setpoint is sign(e_w) K_{P,Q} e_vec plus
// the body-frame reference rate; the feed-forward gain multiplies the
// reference angular acceleration.
Eigen::Vector3d attitudeRateControl(const Eigen::Quaterniond& qRef,
                                    const Eigen::Quaterniond& qFdb,
                                    const Eigen::Vector3d& omegaBodyRef,
                                    const Eigen::Vector3d& omegaBodyFdb,
                                    const Eigen::Vector3d& omegaDotBodyRef,
                                    ControllerState& state,
                                    const Gains& gains, double dt);

ControlInput wrenchCommand(const Eigen::Vector3d& aSp,
                           const Eigen::Vector3d& omegaDotSp,
                           const Eigen::Quaterniond& qFdb,
                           const Eigen::Vector3d& omegaBodyFdb,
                           const InertiaParams& params,
                           const Gains& gains);

// RK4 step of the rigid-body dynamics under a constant body wrench; the
// quaternion is renormalized afterwards. Requires dt <= 1e-2.
FullState rigidBodyStep(const FullState& state, const ControlInput& u,
                        const InertiaParams& params, double dt);

struct TrackLogRow
{
    double t = 0.0;
    Eigen::Vector3d pRef;
    Eigen::Quaterniond qRef;
    Eigen::Vector3d pAct;
    Eigen::Quaterniond qAct;
    Eigen::Vector3d posError;
    double attError = 0.0; // geodesic, radians
    Eigen::Vector3d forceBody;
    Eigen::Vector3d torqueBody;
};

struct TrackResult
{
    std::vector<TrackLogRow> log;
    double rmsPosError = 0.0;
    double maxPosError = 0.0;
    double maxAttError = 0.0; // radians
    bool diverged = false;
};

class DivergenceError : public std::runtime_error
{
public:
    DivergenceError(const std::string& what, TrackResult partial)
        : std::runtime_error(what), result(std::move(partial)) {}
    TrackResult result;
};

double geodesicError(const Eigen::Quaterniond& qRef, const Eigen::Quaterniond& qAct);

// Simulates tracking from the trajectory's initial state (or an explicit
// one). Aborts with DivergenceError when |e_p| exceeds 5 m.
TrackResult track(const Trajectory& traj, const Gains& gains,
                  const InertiaParams& params, double dt,
                  const FullState* initial = nullptr);

} // namespace omnitraj

#endif

#ifndef OMNITRAJ_ROTATION_HPP
#define OMNITRAJ_ROTATION_HPP

#include <Eigen/Dense>

#include <array>

namespace omnitraj {

// Attitude algebra for the stereographic parameterization of SO(3).
//
// A rotation is stored as a unit quaternion Q = [w, r] and is produced from a
// free vector sigma in R^3 by projecting through the pole Q_N = [1,0,0,0]:
//
//   Q(sigma) = [ (|sigma|^2 - 1) / (|sigma|^2 + 1),  2 sigma / (|sigma|^2 + 1) ].
//
// The map is smooth, never reaches the pole, and sends the origin to the
// identity rotation [-1,0,0,0]. All derivatives of R(Q(sigma)) needed by the
// trajectory optimizer are provided in closed form.

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v)
{
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(),
        v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return m;
}

inline Eigen::Vector3d vee(const Eigen::Matrix3d& m)
{
    return {m(2, 1), m(0, 2), m(1, 0)};
}

// Derivatives of the chain sigma -> Q -> R at a fixed sigma.
// G columns are the gradients of (q_w, q_x, q_y, q_z) w.r.t. sigma, so the
// 4-vector dQ/dsigma_i is row i of G. U is the quaternion rate map of the
// angular velocity formula omega = 2 U G^T sigma_dot.
struct AttitudeDerivs
{
    Eigen::Quaterniond q;
    Eigen::Matrix3d rot;
    Eigen::Matrix<double, 3, 4> G;
    Eigen::Matrix<double, 3, 4> U;
    std::array<Eigen::Matrix3d, 4> quatHess; // Hessians of q_w, q_x, q_y, q_z
    std::array<Eigen::Matrix3d, 3> dR;       // dR/dsigma_i
    std::array<std::array<Eigen::Matrix3d, 3>, 3> d2R; // symmetric in (i,j)
};

// sigma -> unit quaternion. Throws std::invalid_argument on non-finite input.
Eigen::Quaterniond quatFromRotvec(const Eigen::Vector3d& sigma);

// Inverse projection. Quaternions with q_w > 0 are negated first (antipodal
// pairs encode one rotation), which keeps the result bounded and the pole
// unreachable. Throws std::invalid_argument if |Q| deviates from 1 by more
// than 1e-9, std::domain_error if q_w lands within 1e-9 of +1 after the flip.
Eigen::Vector3d rotvecFromQuat(const Eigen::Quaterniond& q);

// R = (q_w^2 - r^T r) I + 2 r r^T + 2 q_w r^.
Eigen::Matrix3d rotmatFromQuat(const Eigen::Quaterniond& q);

AttitudeDerivs attitudeDerivs(const Eigen::Vector3d& sigma);

// omega = 2 U G^T sigma_dot, world frame.
Eigen::Vector3d angularVelocity(const AttitudeDerivs& d, const Eigen::Vector3d& sigmaDot);
Eigen::Vector3d angularVelocity(const Eigen::Vector3d& sigma, const Eigen::Vector3d& sigmaDot);

// omega_dot from the expansion of d/dt (R_dot R^T); the quadratic term pairs
// sigma_dot with sigma_dot and the linear term carries sigma_ddot. The result
// is antisymmetrized only to strip round-off.
Eigen::Vector3d angularAcceleration(const AttitudeDerivs& d,
                                    const Eigen::Vector3d& sigmaDot,
                                    const Eigen::Vector3d& sigmaDdot);
Eigen::Vector3d angularAcceleration(const Eigen::Vector3d& sigma,
                                    const Eigen::Vector3d& sigmaDot,
                                    const Eigen::Vector3d& sigmaDdot);

struct OmegaPartials
{
    Eigen::Matrix3d dSigma;    // column k: d omega / d sigma_k
    Eigen::Matrix3d dSigmaDot; // equals 2 U G^T
};

OmegaPartials omegaPartials(const AttitudeDerivs& d, const Eigen::Vector3d& sigmaDot);
OmegaPartials omegaPartials(const Eigen::Vector3d& sigma, const Eigen::Vector3d& sigmaDot);

} // namespace omnitraj

#endif

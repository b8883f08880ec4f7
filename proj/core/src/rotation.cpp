#include "omnitraj/rotation.hpp"

#include <cmath>
#include <stdexcept>

namespace omnitraj {

namespace {

// R(Q) is quadratic in Q, so all derivatives reduce to this symmetric
// bilinear form with B(Q, Q) = R(Q).
Eigen::Matrix3d quatBilinear(double w1, const Eigen::Vector3d& r1,
                             double w2, const Eigen::Vector3d& r2)
{
    Eigen::Matrix3d m = (w1 * w2 - r1.dot(r2)) * Eigen::Matrix3d::Identity();
    m += r1 * r2.transpose() + r2 * r1.transpose();
    m += w1 * skew(r2) + w2 * skew(r1);
    return m;
}

} // namespace

Eigen::Quaterniond quatFromRotvec(const Eigen::Vector3d& sigma)
{
    if (!sigma.allFinite())
    {
        throw std::invalid_argument("quatFromRotvec: non-finite sigma");
    }
    const double n = sigma.squaredNorm();
    const double s = 1.0 / (n + 1.0);
    const Eigen::Vector3d r = 2.0 * s * sigma;
    return Eigen::Quaterniond((n - 1.0) * s, r.x(), r.y(), r.z());
}

Eigen::Vector3d rotvecFromQuat(const Eigen::Quaterniond& q)
{
    const double norm = q.norm();
    if (std::abs(norm - 1.0) > 1e-9)
    {
        throw std::invalid_argument("rotvecFromQuat: quaternion is not unit length");
    }
    double w = q.w();
    Eigen::Vector3d r = q.vec();
    if (w > 0.0)
    {
        w = -w;
        r = -r;
    }
    const double denom = 1.0 - w;
    if (denom < 1e-9)
    {
        throw std::domain_error("rotvecFromQuat: quaternion at the projection pole");
    }
    return r / denom;
}

Eigen::Matrix3d rotmatFromQuat(const Eigen::Quaterniond& q)
{
    return quatBilinear(q.w(), q.vec(), q.w(), q.vec());
}

AttitudeDerivs attitudeDerivs(const Eigen::Vector3d& sigma)
{
    AttitudeDerivs d;
    d.q = quatFromRotvec(sigma);
    d.rot = rotmatFromQuat(d.q);

    const double n = sigma.squaredNorm();
    const double s = 1.0 / (n + 1.0);
    const double s2 = s * s;
    const double s3 = s2 * s;
    const Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();

    // G columns: dq_w/dsigma = 4 s^2 sigma, dr_i/dsigma = 2 s e_i - 4 s^2 sigma_i sigma.
    d.G.col(0) = 4.0 * s2 * sigma;
    for (int i = 0; i < 3; ++i)
    {
        d.G.col(1 + i) = 2.0 * s * eye.col(i) - 4.0 * s2 * sigma(i) * sigma;
    }

    d.U.col(0) = -d.q.vec();
    d.U.rightCols<3>() = d.q.w() * eye + skew(d.q.vec());

    // Hessians of the quaternion components.
    d.quatHess[0] = 4.0 * s2 * eye - 16.0 * s3 * sigma * sigma.transpose();
    for (int i = 0; i < 3; ++i)
    {
        Eigen::Matrix3d h = 16.0 * s3 * sigma(i) * sigma * sigma.transpose();
        h -= 4.0 * s2 * (eye.col(i) * sigma.transpose() + sigma * eye.col(i).transpose());
        h -= 4.0 * s2 * sigma(i) * eye;
        d.quatHess[1 + i] = h;
    }

    const Eigen::Vector4d qv(d.q.w(), d.q.x(), d.q.y(), d.q.z());
    std::array<Eigen::Vector4d, 3> dQ;
    for (int i = 0; i < 3; ++i)
    {
        dQ[i] = d.G.row(i).transpose();
        d.dR[i] = 2.0 * quatBilinear(qv(0), qv.tail<3>(), dQ[i](0), dQ[i].tail<3>());
    }
    for (int i = 0; i < 3; ++i)
    {
        for (int j = i; j < 3; ++j)
        {
            Eigen::Vector4d d2Q;
            for (int a = 0; a < 4; ++a)
            {
                d2Q(a) = d.quatHess[a](i, j);
            }
            Eigen::Matrix3d m = 2.0 * quatBilinear(dQ[i](0), dQ[i].tail<3>(),
                                                   dQ[j](0), dQ[j].tail<3>());
            m += 2.0 * quatBilinear(qv(0), qv.tail<3>(), d2Q(0), d2Q.tail<3>());
            d.d2R[i][j] = m;
            d.d2R[j][i] = m;
        }
    }
    return d;
}

Eigen::Vector3d angularVelocity(const AttitudeDerivs& d, const Eigen::Vector3d& sigmaDot)
{
    return 2.0 * (d.U * (d.G.transpose() * sigmaDot));
}

Eigen::Vector3d angularVelocity(const Eigen::Vector3d& sigma, const Eigen::Vector3d& sigmaDot)
{
    return angularVelocity(attitudeDerivs(sigma), sigmaDot);
}

Eigen::Vector3d angularAcceleration(const AttitudeDerivs& d,
                                    const Eigen::Vector3d& sigmaDot,
                                    const Eigen::Vector3d& sigmaDdot)
{
    Eigen::Matrix3d rdot = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d rddot = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i)
    {
        rdot += d.dR[i] * sigmaDot(i);
        rddot += d.dR[i] * sigmaDdot(i);
        for (int j = 0; j < 3; ++j)
        {
            rddot += d.d2R[i][j] * (sigmaDot(i) * sigmaDot(j));
        }
    }
    const Eigen::Matrix3d a = rddot * d.rot.transpose() + rdot * rdot.transpose();
    return vee(0.5 * (a - a.transpose()));
}

Eigen::Vector3d angularAcceleration(const Eigen::Vector3d& sigma,
                                    const Eigen::Vector3d& sigmaDot,
                                    const Eigen::Vector3d& sigmaDdot)
{
    return angularAcceleration(attitudeDerivs(sigma), sigmaDot, sigmaDdot);
}

OmegaPartials omegaPartials(const AttitudeDerivs& d, const Eigen::Vector3d& sigmaDot)
{
    OmegaPartials p;
    p.dSigmaDot = 2.0 * d.U * d.G.transpose();
    const Eigen::Vector4d qdot = d.G.transpose() * sigmaDot;
    for (int k = 0; k < 3; ++k)
    {
        const Eigen::Vector4d dQk = d.G.row(k).transpose();
        Eigen::Matrix<double, 3, 4> dU;
        dU.col(0) = -dQk.tail<3>();
        dU.rightCols<3>() = dQk(0) * Eigen::Matrix3d::Identity() + skew(dQk.tail<3>());

        // d(G^T sigma_dot)/dsigma_k: component a is H_a(:,k) . sigma_dot.
        Eigen::Vector4d dqdot;
        for (int a = 0; a < 4; ++a)
        {
            dqdot(a) = d.quatHess[a].col(k).dot(sigmaDot);
        }
        p.dSigma.col(k) = 2.0 * (dU * qdot + d.U * dqdot);
    }
    return p;
}

OmegaPartials omegaPartials(const Eigen::Vector3d& sigma, const Eigen::Vector3d& sigmaDot)
{
    return omegaPartials(attitudeDerivs(sigma), sigmaDot);
}

} // namespace omnitraj

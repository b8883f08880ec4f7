#include "omnitraj/costs.hpp"

#include "omnitraj/rotation.hpp"

#include <cmath>
#include <stdexcept>

namespace omnitraj {

void CostGradients::setZero(int s, int pieces)
{
    value = 0.0;
    dCoeffs = Eigen::MatrixXd::Zero(2 * s * pieces, 6);
    dTimes = Eigen::VectorXd::Zero(pieces);
}

CostGradients& CostGradients::operator+=(const CostGradients& other)
{
    value += other.value;
    dCoeffs += other.dCoeffs;
    dTimes += other.dTimes;
    return *this;
}

std::pair<double, double> hingeCubic(double x)
{
    if (x <= 0.0)
    {
        return {0.0, 0.0};
    }
    return {x * x * x, 3.0 * x * x};
}

CostGradients smoothnessEnergy(const Trajectory& traj, double kRho)
{
    const int s = traj.order();
    const int m = traj.pieceCount();
    const int width = 2 * s;

    CostGradients out;
    out.setZero(s, m);

    for (int i = 0; i < m; ++i)
    {
        const double ti = traj.durations()(i);
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(width, width);
        const Eigen::VectorXd f = polyBasis(1.0, s, s); // factorial factors j!/(j-s)!
        double tp = ti;
        // gram(j,k) = f_j f_k T^(j+k-2s+1) / (j+k-2s+1) for j,k >= s.
        for (int sum = 2 * s; sum <= 2 * width - 2; ++sum)
        {
            const double entry = tp / static_cast<double>(sum - 2 * s + 1);
            for (int j = std::max(s, sum - width + 1); j <= sum - s && j < width; ++j)
            {
                const int k = sum - j;
                gram(j, k) = f(j) * f(k) * entry;
            }
            tp *= ti;
        }

        const auto c = traj.pieceCoeffs(i);
        const Eigen::MatrixXd gc = gram * c;
        out.value += c.cwiseProduct(gc).sum();
        out.dCoeffs.block(width * i, 0, width, 6) = 2.0 * gc;

        const Eigen::VectorXd betaS = polyBasis(ti, s, s);
        out.dTimes(i) = (c.transpose() * betaS).squaredNorm() + kRho;
    }
    out.value += kRho * traj.durations().sum();
    return out;
}

CostGradients kinodynamicPenalties(const Trajectory& traj,
                                   const Limits& limits,
                                   const PenaltyWeights& weights)
{
    const int s = traj.order();
    const int m = traj.pieceCount();
    const int width = 2 * s;
    const int kappa = weights.kappa;
    if (kappa < 2)
    {
        throw std::invalid_argument("kinodynamicPenalties: kappa must be at least 2");
    }

    CostGradients out;
    out.setZero(s, m);

    const double v2 = limits.vMax * limits.vMax;
    const double a2 = limits.aMax * limits.aMax;
    const double w2 = limits.omegaMax * limits.omegaMax;

    for (int i = 0; i < m; ++i)
    {
        const double ti = traj.durations()(i);
        const double dt = ti / kappa;
        const auto c = traj.pieceCoeffs(i);
        const auto cp = c.leftCols<3>();
        const auto cs = c.rightCols<3>();
        auto dcp = out.dCoeffs.block(width * i, 0, width, 3);
        auto dcs = out.dCoeffs.block(width * i, 3, width, 3);

        for (int j = 1; j <= kappa; ++j)
        {
            const double frac = static_cast<double>(j) / kappa;
            const double alpha = frac * ti;
            const Eigen::VectorXd b0 = polyBasis(alpha, 0, s);
            const Eigen::VectorXd b1 = polyBasis(alpha, 1, s);
            const Eigen::VectorXd b2 = polyBasis(alpha, 2, s);
            const Eigen::VectorXd b3 = polyBasis(alpha, 3, s);

            const Eigen::Vector3d vel = cp.transpose() * b1;
            const Eigen::Vector3d acc = cp.transpose() * b2;
            const Eigen::Vector3d jerk = cp.transpose() * b3;

            const double gv = vel.squaredNorm() - v2;
            if (gv > 0.0)
            {
                const double g2 = gv * gv;
                out.value += weights.wV * g2 * gv * dt;
                dcp += weights.wV * (6.0 * dt) * g2 * (b1 * vel.transpose());
                out.dTimes(i) +=
                    weights.wV * (g2 / kappa) * (gv + 6.0 * ti * frac * vel.dot(acc));
            }

            const double ga = acc.squaredNorm() - a2;
            if (ga > 0.0)
            {
                const double g2 = ga * ga;
                out.value += weights.wA * g2 * ga * dt;
                dcp += weights.wA * (6.0 * dt) * g2 * (b2 * acc.transpose());
                out.dTimes(i) +=
                    weights.wA * (g2 / kappa) * (ga + 6.0 * ti * frac * acc.dot(jerk));
            }

            const Eigen::Vector3d sigma = cs.transpose() * b0;
            const Eigen::Vector3d sigmaDot = cs.transpose() * b1;
            const Eigen::Vector3d sigmaDdot = cs.transpose() * b2;
            const AttitudeDerivs ad = attitudeDerivs(sigma);
            const Eigen::Vector3d omega = angularVelocity(ad, sigmaDot);

            const double gw = omega.squaredNorm() - w2;
            if (gw > 0.0)
            {
                const double g2 = gw * gw;
                out.value += weights.wOmega * g2 * gw * dt;
                const OmegaPartials op = omegaPartials(ad, sigmaDot);
                const Eigen::Vector3d gs = op.dSigma.transpose() * omega;
                const Eigen::Vector3d gsd = op.dSigmaDot.transpose() * omega;
                dcs += weights.wOmega * (6.0 * dt) * g2 *
                       (b0 * gs.transpose() + b1 * gsd.transpose());
                const Eigen::Vector3d omegaDot = angularAcceleration(ad, sigmaDot, sigmaDdot);
                out.dTimes(i) += weights.wOmega * (g2 / kappa) *
                                 (gw + 6.0 * ti * frac * omega.dot(omegaDot));
            }
        }
    }
    return out;
}

CostGradients corridorPenalty(const Trajectory& traj,
                              std::span<const int> pieceToPoly,
                              std::span<const Polyhedron> polys,
                              const VehicleShape& shape,
                              const PenaltyWeights& weights)
{
    const int s = traj.order();
    const int m = traj.pieceCount();
    const int width = 2 * s;
    const int kappa = weights.kappa;
    if (static_cast<int>(pieceToPoly.size()) != m)
    {
        throw std::invalid_argument("corridorPenalty: piece without polyhedron assignment");
    }

    CostGradients out;
    out.setZero(s, m);

    for (int i = 0; i < m; ++i)
    {
        const int polyIdx = pieceToPoly[i];
        if (polyIdx < 0 || polyIdx >= static_cast<int>(polys.size()))
        {
            throw std::invalid_argument("corridorPenalty: piece without polyhedron assignment");
        }
        const auto& faces = polys[polyIdx].halfspaces();
        const double ti = traj.durations()(i);
        const double dt = ti / kappa;
        const auto c = traj.pieceCoeffs(i);
        const auto cp = c.leftCols<3>();
        const auto cs = c.rightCols<3>();
        auto dcp = out.dCoeffs.block(width * i, 0, width, 3);
        auto dcs = out.dCoeffs.block(width * i, 3, width, 3);

        for (int j = 1; j <= kappa; ++j)
        {
            const double frac = static_cast<double>(j) / kappa;
            const double alpha = frac * ti;
            const Eigen::VectorXd b0 = polyBasis(alpha, 0, s);
            const Eigen::VectorXd b1 = polyBasis(alpha, 1, s);

            const Eigen::Vector3d pos = cp.transpose() * b0;
            const Eigen::Vector3d vel = cp.transpose() * b1;
            const Eigen::Vector3d sigma = cs.transpose() * b0;
            const Eigen::Vector3d sigmaDot = cs.transpose() * b1;
            const AttitudeDerivs ad = attitudeDerivs(sigma);

            Eigen::Matrix3d rdot = Eigen::Matrix3d::Zero();
            for (int w = 0; w < 3; ++w)
            {
                rdot += ad.dR[w] * sigmaDot(w);
            }

            for (const auto& vb : shape.verticesBody)
            {
                const Eigen::Vector3d vWorld = pos + ad.rot * vb;
                const Eigen::Vector3d vDrift = vel + rdot * vb;
                for (const auto& face : faces)
                {
                    const double g = face.n.dot(vWorld) - face.d;
                    if (g <= 0.0)
                    {
                        continue;
                    }
                    const double g2 = g * g;
                    out.value += weights.wCorridor * g2 * g * dt;
                    dcp += weights.wCorridor * (3.0 * dt) * g2 * (b0 * face.n.transpose());
                    Eigen::Vector3d wSigma;
                    for (int w = 0; w < 3; ++w)
                    {
                        wSigma(w) = face.n.dot(ad.dR[w] * vb);
                    }
                    dcs += weights.wCorridor * (3.0 * dt) * g2 * (b0 * wSigma.transpose());
                    out.dTimes(i) += weights.wCorridor * (g2 / kappa) *
                                     (g + 3.0 * ti * frac * face.n.dot(vDrift));
                }
            }
        }
    }
    return out;
}

CostGradients totalCost(const Trajectory& traj,
                        const Limits& limits,
                        const PenaltyWeights& weights,
                        std::span<const int> pieceToPoly,
                        std::span<const Polyhedron> polys,
                        const VehicleShape& shape)
{
    CostGradients out = smoothnessEnergy(traj, weights.kRho);
    out += kinodynamicPenalties(traj, limits, weights);
    out += corridorPenalty(traj, pieceToPoly, polys, shape, weights);
    return out;
}

} // namespace omnitraj

#include "omnitraj/optimizer.hpp"

#include "omnitraj/rotation.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace omnitraj {

PieceAllocation allocatePieces(const Corridor& corridor, double dPiece)
{
    if (corridor.polys.empty() || corridor.path.size() != corridor.polys.size() + 1)
    {
        throw std::invalid_argument("allocatePieces: malformed corridor");
    }
    if (!(dPiece > 0.0))
    {
        throw std::invalid_argument("allocatePieces: piece density must be positive");
    }

    PieceAllocation alloc;
    const int segments = static_cast<int>(corridor.polys.size());
    std::vector<int> perSegment(segments);
    for (int i = 0; i < segments; ++i)
    {
        const double len = (corridor.path[i + 1] - corridor.path[i]).norm();
        const int m = std::clamp(static_cast<int>(std::ceil(len / dPiece)), 1, 8);
        perSegment[i] = m;
        alloc.pieces += m;
        for (int j = 0; j < m; ++j)
        {
            alloc.pieceToPoly.push_back(i);
            alloc.pieceShareLength.push_back(len / m);
        }
    }

    int cum = 0;
    for (int i = 0; i + 1 < segments; ++i)
    {
        cum += perSegment[i];
        alloc.intersectionWaypoints.push_back(cum);
    }

    // Interior waypoint w (1-based) parameterizes over the vertices of its
    // containing polytope; intersection waypoints over P_i cap P_{i+1}.
    alloc.waypointVertices.resize(alloc.pieces > 0 ? alloc.pieces - 1 : 0);
    int seg = 0;
    cum = perSegment.empty() ? 0 : perSegment[0];
    for (int w = 1; w < alloc.pieces; ++w)
    {
        while (w > cum)
        {
            ++seg;
            cum += perSegment[seg];
        }
        if (w == cum && seg + 1 < segments)
        {
            alloc.waypointVertices[w - 1] =
                enumerateVertices(intersect(corridor.polys[seg], corridor.polys[seg + 1]));
        }
        else
        {
            alloc.waypointVertices[w - 1] = enumerateVertices(corridor.polys[seg]);
        }
    }
    return alloc;
}

Eigen::VectorXd forwardT(const Eigen::VectorXd& tau)
{
    for (int i = 0; i < tau.size(); ++i)
    {
        if (!(std::abs(tau(i)) <= 30.0))
        {
            throw std::domain_error("forwardT: |tau| exceeds overflow guard");
        }
    }
    return tau.array().exp();
}

WaypointMap forwardQp(const Eigen::VectorXd& xi,
                      const std::vector<Eigen::Vector3d>& vertices)
{
    const int k = static_cast<int>(vertices.size());
    if (k == 0)
    {
        throw std::invalid_argument("forwardQp: empty vertex set");
    }
    if (xi.size() != k)
    {
        throw std::invalid_argument("forwardQp: xi length does not match vertex count");
    }
    double total = 0.0;
    Eigen::VectorXd w(k);
    for (int j = 0; j < k; ++j)
    {
        w(j) = xi(j) * xi(j) + 1.0;
        total += w(j);
    }
    WaypointMap out;
    out.point = Eigen::Vector3d::Zero();
    for (int j = 0; j < k; ++j)
    {
        out.point += (w(j) / total) * vertices[j];
    }
    out.jacobian.resize(3, k);
    for (int j = 0; j < k; ++j)
    {
        out.jacobian.col(j) = (2.0 * xi(j) / total) * (vertices[j] - out.point);
    }
    return out;
}

int DecisionVars::dimension(const PieceAllocation& alloc)
{
    int dim = 0;
    for (const auto& verts : alloc.waypointVertices)
    {
        dim += static_cast<int>(verts.size());
    }
    dim += 3 * (alloc.pieces - 1);
    dim += alloc.pieces;
    return dim;
}

Eigen::VectorXd DecisionVars::pack() const
{
    int dim = 0;
    for (const auto& x : xi)
    {
        dim += static_cast<int>(x.size());
    }
    dim += static_cast<int>(qSigma.size()) + static_cast<int>(tau.size());
    Eigen::VectorXd out(dim);
    int at = 0;
    for (const auto& x : xi)
    {
        out.segment(at, x.size()) = x;
        at += static_cast<int>(x.size());
    }
    for (int c = 0; c < qSigma.cols(); ++c)
    {
        out.segment<3>(at) = qSigma.col(c);
        at += 3;
    }
    out.segment(at, tau.size()) = tau;
    return out;
}

DecisionVars DecisionVars::unpack(const Eigen::VectorXd& x, const PieceAllocation& alloc)
{
    DecisionVars v;
    const int waypoints = alloc.pieces - 1;
    v.xi.resize(waypoints);
    int at = 0;
    for (int w = 0; w < waypoints; ++w)
    {
        const int k = static_cast<int>(alloc.waypointVertices[w].size());
        v.xi[w] = x.segment(at, k);
        at += k;
    }
    v.qSigma.resize(3, waypoints);
    for (int w = 0; w < waypoints; ++w)
    {
        v.qSigma.col(w) = x.segment<3>(at);
        at += 3;
    }
    v.tau = x.segment(at, alloc.pieces);
    return v;
}

DecisionVars initialize(const ProblemSpec& spec, const PieceAllocation& alloc)
{
    DecisionVars v;
    const int waypoints = alloc.pieces - 1;
    v.xi.resize(waypoints);
    for (int w = 0; w < waypoints; ++w)
    {
        v.xi[w] = Eigen::VectorXd::Zero(alloc.waypointVertices[w].size());
    }
    v.qSigma = Eigen::MatrixXd::Zero(3, waypoints);
    v.tau.resize(alloc.pieces);
    for (int i = 0; i < alloc.pieces; ++i)
    {
        v.tau(i) = std::log(std::max(alloc.pieceShareLength[i] / spec.limits.vMax, 0.1));
    }
    return v;
}

namespace {

BoundaryCondition boundaryFromPose(const Pose& pose, int s)
{
    Eigen::Matrix<double, 6, 1> z;
    z.head<3>() = pose.position;
    z.tail<3>() = rotvecFromQuat(pose.attitude);
    return BoundaryCondition::rest(s, z);
}

} // namespace

double objective(const Eigen::VectorXd& x, const ProblemSpec& spec,
                 const PieceAllocation& alloc, MincoSystem& system,
                 Eigen::VectorXd& grad)
{
    const DecisionVars vars = DecisionVars::unpack(x, alloc);
    const int m = alloc.pieces;
    const int waypoints = m - 1;

    const Eigen::VectorXd t = forwardT(vars.tau);

    std::vector<WaypointMap> maps(waypoints);
    Eigen::MatrixXd q(6, waypoints);
    for (int w = 0; w < waypoints; ++w)
    {
        maps[w] = forwardQp(vars.xi[w], alloc.waypointVertices[w]);
        q.col(w).head<3>() = maps[w].point;
        q.col(w).tail<3>() = vars.qSigma.col(w);
    }

    system.setParameters(q, t);
    const Trajectory traj = system.trajectory();

    const CostGradients cost = totalCost(traj, spec.limits, spec.weights,
                                         alloc.pieceToPoly, spec.corridor.polys,
                                         spec.shape);

    Eigen::MatrixXd dKdq;
    Eigen::VectorXd dKdT;
    system.propagateGradient(cost.dCoeffs, cost.dTimes, dKdq, dKdT);

    grad.resize(x.size());
    int at = 0;
    for (int w = 0; w < waypoints; ++w)
    {
        const Eigen::Vector3d gp = dKdq.col(w).head<3>();
        grad.segment(at, vars.xi[w].size()) = maps[w].jacobian.transpose() * gp;
        at += static_cast<int>(vars.xi[w].size());
    }
    for (int w = 0; w < waypoints; ++w)
    {
        grad.segment<3>(at) = dKdq.col(w).tail<3>();
        at += 3;
    }
    grad.segment(at, m) = dKdT.cwiseProduct(t);
    return cost.value;
}

void measureViolations(const Trajectory& traj, const ProblemSpec& spec,
                       const PieceAllocation& alloc, int samplesPerPiece,
                       SolveReport& report)
{
    report.velocityViolation = 0.0;
    report.accelViolation = 0.0;
    report.omegaViolation = 0.0;
    report.corridorViolation = 0.0;

    const int m = traj.pieceCount();
    const int s = traj.order();
    for (int i = 0; i < m; ++i)
    {
        const double ti = traj.durations()(i);
        const auto c = traj.pieceCoeffs(i);
        const auto& poly = spec.corridor.polys[alloc.pieceToPoly[i]];
        for (int j = 0; j <= samplesPerPiece; ++j)
        {
            const double alpha = ti * j / samplesPerPiece;
            const Eigen::VectorXd b0 = polyBasis(alpha, 0, s);
            const Eigen::VectorXd b1 = polyBasis(alpha, 1, s);
            const Eigen::VectorXd b2 = polyBasis(alpha, 2, s);
            const Eigen::Vector3d pos = c.leftCols<3>().transpose() * b0;
            const Eigen::Vector3d vel = c.leftCols<3>().transpose() * b1;
            const Eigen::Vector3d acc = c.leftCols<3>().transpose() * b2;
            const Eigen::Vector3d sigma = c.rightCols<3>().transpose() * b0;
            const Eigen::Vector3d sigmaDot = c.rightCols<3>().transpose() * b1;
            const AttitudeDerivs ad = attitudeDerivs(sigma);
            const Eigen::Vector3d omega = angularVelocity(ad, sigmaDot);

            report.velocityViolation =
                std::max(report.velocityViolation, vel.norm() - spec.limits.vMax);
            report.accelViolation =
                std::max(report.accelViolation, acc.norm() - spec.limits.aMax);
            report.omegaViolation =
                std::max(report.omegaViolation, omega.norm() - spec.limits.omegaMax);
            for (const auto& vb : spec.shape.verticesBody)
            {
                report.corridorViolation = std::max(
                    report.corridorViolation, poly.maxViolation(pos + ad.rot * vb));
            }
        }
    }
    report.velocityViolation = std::max(0.0, report.velocityViolation);
    report.accelViolation = std::max(0.0, report.accelViolation);
    report.omegaViolation = std::max(0.0, report.omegaViolation);
    report.corridorViolation = std::max(0.0, report.corridorViolation);
}

SolveResult solve(const ProblemSpec& spec)
{
    const auto violations = validate(spec.corridor);
    if (!violations.empty())
    {
        throw std::invalid_argument("solve: corridor fails validation: " +
                                    violations.front().detail);
    }

    SolveResult result;
    result.allocation = allocatePieces(spec.corridor, spec.dPiece);
    const PieceAllocation& alloc = result.allocation;

    MincoSystem system(spec.s, alloc.pieces, boundaryFromPose(spec.start, spec.s),
                       boundaryFromPose(spec.goal, spec.s));

    const Eigen::VectorXd x0 = initialize(spec, alloc).pack();
    const auto began = std::chrono::steady_clock::now();
    const LbfgsResult lb = lbfgsMinimize(
        [&](const Eigen::VectorXd& x, Eigen::VectorXd& g)
        { return objective(x, spec, alloc, system, g); },
        x0, spec.solver);
    const auto ended = std::chrono::steady_clock::now();

    // Rebuild the trajectory at the returned iterate (the system may hold a
    // rejected line-search trial).
    Eigen::VectorXd scratch;
    objective(lb.x, spec, alloc, system, scratch);
    result.trajectory = system.trajectory();

    result.report.iterations = lb.iterations;
    result.report.evaluations = lb.evaluations;
    result.report.optimizeSeconds =
        std::chrono::duration<double>(ended - began).count();
    result.report.finalCost = lb.f;
    result.report.termination = statusName(lb.status);
    result.report.success = lb.status != LbfgsStatus::NonFiniteValue;
    result.report.pieces = alloc.pieces;
    result.report.skippedUpdates = lb.skippedUpdates;
    measureViolations(result.trajectory, spec, alloc, 4 * spec.weights.kappa,
                      result.report);
    return result;
}

} // namespace omnitraj

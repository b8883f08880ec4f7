#include "omnitraj/minco.hpp"

#include <cmath>
#include <stdexcept>

namespace omnitraj {

namespace {

// j! / (j-order)! as a double; exact for the small integers used here.
double derivFactor(int j, int order)
{
    double f = 1.0;
    for (int k = 0; k < order; ++k)
    {
        f *= static_cast<double>(j - k);
    }
    return f;
}

} // namespace

Eigen::VectorXd polyBasis(double alpha, int order, int s)
{
    const int n = 2 * s;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    if (order >= n)
    {
        return b;
    }
    double pw = 1.0;
    for (int j = order; j < n; ++j)
    {
        b(j) = derivFactor(j, order) * pw;
        pw *= alpha;
    }
    return b;
}

Trajectory::Trajectory(int s, Eigen::VectorXd durations, Eigen::MatrixXd coeffs)
    : s_(s), durations_(std::move(durations)), coeffs_(std::move(coeffs))
{
    if (coeffs_.rows() != 2 * s_ * durations_.size() || coeffs_.cols() != 6)
    {
        throw std::invalid_argument("Trajectory: coefficient shape mismatch");
    }
}

Eigen::Block<const Eigen::MatrixXd> Trajectory::pieceCoeffs(int i) const
{
    return coeffs_.block(2 * s_ * i, 0, 2 * s_, 6);
}

int Trajectory::pieceIndex(double t, double& localTime) const
{
    const int m = pieceCount();
    double rem = t;
    int idx = 0;
    while (idx + 1 < m && rem >= durations_(idx))
    {
        rem -= durations_(idx);
        ++idx;
    }
    localTime = rem;
    return idx;
}

Eigen::Matrix<double, 6, 1> Trajectory::eval(double t, int order) const
{
    if (order < 0 || order > 2 * s_ - 1)
    {
        throw std::out_of_range("Trajectory::eval: derivative order out of range");
    }
    if (t < 0.0 || t > totalDuration())
    {
        throw std::out_of_range("Trajectory::eval: time outside trajectory domain");
    }
    double local = 0.0;
    const int idx = pieceIndex(t, local);
    return pieceCoeffs(idx).transpose() * polyBasis(local, order, s_);
}

BoundaryCondition BoundaryCondition::rest(int s, const Eigen::Matrix<double, 6, 1>& pose)
{
    BoundaryCondition bc;
    bc.derivs = Eigen::MatrixXd::Zero(s, 6);
    bc.derivs.row(0) = pose.transpose();
    return bc;
}

void MincoSystem::Band::init(int size, int lower, int upper)
{
    n = size;
    kl = lower;
    ku = upper;
    ab.setZero(2 * kl + ku + 1, n);
    piv.assign(n, 0);
}

void MincoSystem::Band::factorize()
{
    for (int k = 0; k < n; ++k)
    {
        const int rowEnd = std::min(n - 1, k + kl);
        int p = k;
        double best = std::abs(at(k, k));
        for (int i = k + 1; i <= rowEnd; ++i)
        {
            const double v = std::abs(at(i, k));
            if (v > best)
            {
                best = v;
                p = i;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best))
        {
            throw std::runtime_error("MincoSystem: singular linear system");
        }
        piv[k] = p;
        const int colEnd = std::min(n - 1, k + kl + ku);
        if (p != k)
        {
            for (int j = k; j <= colEnd; ++j)
            {
                std::swap(at(k, j), at(p, j));
            }
        }
        const double pivot = at(k, k);
        for (int i = k + 1; i <= rowEnd; ++i)
        {
            const double m = at(i, k) / pivot;
            at(i, k) = m;
            if (m != 0.0)
            {
                for (int j = k + 1; j <= colEnd; ++j)
                {
                    at(i, j) -= m * at(k, j);
                }
            }
        }
    }
}

void MincoSystem::Band::solve(Eigen::MatrixXd& rhs) const
{
    for (int k = 0; k < n; ++k)
    {
        if (piv[k] != k)
        {
            rhs.row(k).swap(rhs.row(piv[k]));
        }
        const int rowEnd = std::min(n - 1, k + kl);
        for (int i = k + 1; i <= rowEnd; ++i)
        {
            rhs.row(i) -= at(i, k) * rhs.row(k);
        }
    }
    for (int k = n - 1; k >= 0; --k)
    {
        rhs.row(k) /= at(k, k);
        const int rowBegin = std::max(0, k - kl - ku);
        for (int i = rowBegin; i < k; ++i)
        {
            rhs.row(i) -= at(i, k) * rhs.row(k);
        }
    }
}

void MincoSystem::Band::solveTranspose(Eigen::MatrixXd& rhs) const
{
    // A = P0 L0 P1 L1 ... U, so A^T x = b unwinds as U^T, then L_k^T and the
    // row swaps in reverse order.
    for (int k = 0; k < n; ++k)
    {
        rhs.row(k) /= at(k, k);
        const int colEnd = std::min(n - 1, k + kl + ku);
        for (int j = k + 1; j <= colEnd; ++j)
        {
            rhs.row(j) -= at(k, j) * rhs.row(k);
        }
    }
    for (int k = n - 1; k >= 0; --k)
    {
        const int rowEnd = std::min(n - 1, k + kl);
        for (int i = k + 1; i <= rowEnd; ++i)
        {
            rhs.row(k) -= at(i, k) * rhs.row(i);
        }
        if (piv[k] != k)
        {
            rhs.row(k).swap(rhs.row(piv[k]));
        }
    }
}

MincoSystem::MincoSystem(int s, int pieces,
                         const BoundaryCondition& bcStart,
                         const BoundaryCondition& bcEnd)
    : s_(s), pieces_(pieces), bcStart_(bcStart.derivs), bcEnd_(bcEnd.derivs)
{
    if (s_ < 2 || s_ > 4)
    {
        throw std::invalid_argument("MincoSystem: order s must be 2, 3 or 4");
    }
    if (pieces_ < 1)
    {
        throw std::invalid_argument("MincoSystem: need at least one piece");
    }
    if (bcStart_.rows() != s_ || bcStart_.cols() != 6 ||
        bcEnd_.rows() != s_ || bcEnd_.cols() != 6)
    {
        throw std::invalid_argument("MincoSystem: boundary condition shape mismatch");
    }
}

void MincoSystem::setParameters(const Eigen::MatrixXd& q, const Eigen::VectorXd& T)
{
    const int m = pieces_;
    if (q.cols() != m - 1 || (m > 1 && q.rows() != 6))
    {
        throw std::invalid_argument("MincoSystem: waypoint shape mismatch");
    }
    if (T.size() != m)
    {
        throw std::invalid_argument("MincoSystem: duration count mismatch");
    }
    for (int i = 0; i < m; ++i)
    {
        if (!(T(i) > 0.0) || !std::isfinite(T(i)))
        {
            throw std::invalid_argument("MincoSystem: durations must be strictly positive");
        }
    }

    const int width = 2 * s_;
    const int n = width * m;
    band_.init(n, width, width);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 6);

    // Start boundary: beta^(k)(0) on piece 0.
    for (int k = 0; k < s_; ++k)
    {
        band_.at(k, k) = derivFactor(k, k);
        rhs.row(k) = bcStart_.row(k);
    }

    // Interior knot i joins pieces i-1 and i. Rows are ordered to keep the
    // band at 2s: continuity of orders s..2s-2, then interpolation on the
    // left piece, then continuity of orders 0..s-1.
    for (int i = 1; i < m; ++i)
    {
        const int base = s_ + (i - 1) * width;
        const int colL = (i - 1) * width;
        const int colR = i * width;
        const double Ti = T(i - 1);

        for (int t = 0; t < s_ - 1; ++t)
        {
            const int o = s_ + t;
            const Eigen::VectorXd beta = polyBasis(Ti, o, s_);
            for (int j = o; j < width; ++j)
            {
                band_.at(base + t, colL + j) = beta(j);
            }
            band_.at(base + t, colR + o) = -derivFactor(o, o);
        }

        const int interpRow = base + s_ - 1;
        const Eigen::VectorXd beta0 = polyBasis(Ti, 0, s_);
        for (int j = 0; j < width; ++j)
        {
            band_.at(interpRow, colL + j) = beta0(j);
        }
        rhs.row(interpRow) = q.col(i - 1).transpose();

        for (int o = 0; o < s_; ++o)
        {
            const int row = base + s_ + o;
            const Eigen::VectorXd beta = polyBasis(Ti, o, s_);
            for (int j = o; j < width; ++j)
            {
                band_.at(row, colL + j) = beta(j);
            }
            band_.at(row, colR + o) = -derivFactor(o, o);
        }
    }

    // End boundary: beta^(k)(T_M) on the last piece.
    const int colLast = (m - 1) * width;
    for (int k = 0; k < s_; ++k)
    {
        const int row = n - s_ + k;
        const Eigen::VectorXd beta = polyBasis(T(m - 1), k, s_);
        for (int j = k; j < width; ++j)
        {
            band_.at(row, colLast + j) = beta(j);
        }
        rhs.row(row) = bcEnd_.row(k);
    }

    band_.factorize();
    band_.solve(rhs);
    coeffs_ = std::move(rhs);
    durations_ = T;
    factorized_ = true;
}

Trajectory MincoSystem::trajectory() const
{
    if (!factorized_)
    {
        throw std::logic_error("MincoSystem: setParameters has not been called");
    }
    return Trajectory(s_, durations_, coeffs_);
}

void MincoSystem::propagateGradient(const Eigen::MatrixXd& dKdCoeffs,
                                    const Eigen::VectorXd& dKdTimeDirect,
                                    Eigen::MatrixXd& dKdq,
                                    Eigen::VectorXd& dKdT) const
{
    if (!factorized_)
    {
        throw std::logic_error("MincoSystem: setParameters has not been called");
    }
    const int m = pieces_;
    const int width = 2 * s_;
    const int n = width * m;
    if (dKdCoeffs.rows() != n || dKdCoeffs.cols() != 6 || dKdTimeDirect.size() != m)
    {
        throw std::invalid_argument("propagateGradient: gradient shape mismatch");
    }

    Eigen::MatrixXd adj = dKdCoeffs;
    band_.solveTranspose(adj);

    dKdq.resize(6, m - 1);
    dKdT = dKdTimeDirect;

    // dK/dT_i -= lambda_r . (dRow_r/dT_i) c for every row r built from T_i.
    // A row evaluating beta^(o)(T_i) differentiates to beta^(o+1)(T_i).
    auto accumulate = [&](int row, int piece, int order)
    {
        const Eigen::VectorXd beta = polyBasis(durations_(piece), order + 1, s_);
        const Eigen::Matrix<double, 1, 6> y =
            beta.transpose() * coeffs_.block(width * piece, 0, width, 6);
        dKdT(piece) -= adj.row(row).dot(y);
    };

    for (int i = 1; i < m; ++i)
    {
        const int base = s_ + (i - 1) * width;
        for (int t = 0; t < s_ - 1; ++t)
        {
            accumulate(base + t, i - 1, s_ + t);
        }
        const int interpRow = base + s_ - 1;
        accumulate(interpRow, i - 1, 0);
        dKdq.col(i - 1) = adj.row(interpRow).transpose();
        for (int o = 0; o < s_; ++o)
        {
            accumulate(base + s_ + o, i - 1, o);
        }
    }
    for (int k = 0; k < s_; ++k)
    {
        accumulate(n - s_ + k, m - 1, k);
    }
}

Trajectory constructTrajectory(const Eigen::MatrixXd& q,
                               const Eigen::VectorXd& T,
                               const BoundaryCondition& bcStart,
                               const BoundaryCondition& bcEnd,
                               int s)
{
    MincoSystem sys(s, static_cast<int>(T.size()), bcStart, bcEnd);
    sys.setParameters(q, T);
    return sys.trajectory();
}

} // namespace omnitraj

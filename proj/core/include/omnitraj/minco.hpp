#ifndef OMNITRAJ_MINCO_HPP
#define OMNITRAJ_MINCO_HPP

#include <Eigen/Dense>

#include <vector>

namespace omnitraj {

// Minimum-control-effort piecewise polynomials over the 6-D flat output
// z = (p, sigma). Each of the M pieces is a degree-(2s-1) polynomial in the
// monomial basis beta(a) = [1, a, ..., a^{2s-1}] with local time
// a = t - t_{i-1}. Coefficients are recovered from waypoints and durations by
// a banded linear system; the adjoint of that map pushes cost gradients from
// coefficients back to (q, T).

// beta^(order)(alpha) as a length-2s vector.
Eigen::VectorXd polyBasis(double alpha, int order, int s);

class Trajectory
{
public:
    Trajectory() = default;
    Trajectory(int s, Eigen::VectorXd durations, Eigen::MatrixXd coeffs);

    int order() const { return s_; }
    int pieceCount() const { return static_cast<int>(durations_.size()); }
    double totalDuration() const { return durations_.sum(); }
    const Eigen::VectorXd& durations() const { return durations_; }

    // Stacked (2sM) x 6 coefficient matrix; piece i occupies rows [2s*i, 2s*(i+1)).
    const Eigen::MatrixXd& coeffs() const { return coeffs_; }
    Eigen::Block<const Eigen::MatrixXd> pieceCoeffs(int i) const;

    // Piece lookup uses half-open intervals [t_{i-1}, t_i); the final piece is
    // closed. Throws std::out_of_range outside [0, sum T] or for order > 2s-1.
    Eigen::Matrix<double, 6, 1> eval(double t, int order) const;

    int pieceIndex(double t, double& localTime) const;

private:
    int s_ = 0;
    Eigen::VectorXd durations_;
    Eigen::MatrixXd coeffs_;
};

struct BoundaryCondition
{
    // Row k holds z^(k) at the endpoint, k = 0..s-1; 6 columns.
    Eigen::MatrixXd derivs;

    static BoundaryCondition rest(int s, const Eigen::Matrix<double, 6, 1>& pose);
};

// Owns the banded system M(T) c = b(q) for a fixed (s, M, boundary) problem
// shape. setParameters factorizes and solves; propagateGradient reuses the
// factorization for the adjoint solve.
class MincoSystem
{
public:
    MincoSystem(int s, int pieces,
                const BoundaryCondition& bcStart,
                const BoundaryCondition& bcEnd);

    // q: 6 x (M-1) interior waypoints, T: M positive durations.
    // Throws std::invalid_argument on shape errors or nonpositive durations,
    // std::runtime_error when the system is singular.
    void setParameters(const Eigen::MatrixXd& q, const Eigen::VectorXd& T);

    Trajectory trajectory() const;
    int pieceCount() const { return pieces_; }
    int order() const { return s_; }

    // Adjoint of c(q, T). dKdCoeffs is the stacked (2sM) x 6 partial gradient,
    // dKdTimeDirect the explicit M-vector partial. Outputs: dKdq (6 x (M-1))
    // and total dKdT (M).
    void propagateGradient(const Eigen::MatrixXd& dKdCoeffs,
                           const Eigen::VectorXd& dKdTimeDirect,
                           Eigen::MatrixXd& dKdq,
                           Eigen::VectorXd& dKdT) const;

private:
    int s_ = 0;
    int pieces_ = 0;
    Eigen::MatrixXd bcStart_;
    Eigen::MatrixXd bcEnd_;
    Eigen::VectorXd durations_;
    Eigen::MatrixXd coeffs_;

    // Banded LU with partial pivoting, LAPACK-style band storage.
    struct Band
    {
        int n = 0;
        int kl = 0;
        int ku = 0;
        Eigen::MatrixXd ab; // (2*kl + ku + 1) x n
        std::vector<int> piv;

        void init(int size, int lower, int upper);
        double& at(int i, int j) { return ab(i - j + kl + ku, j); }
        double at(int i, int j) const { return ab(i - j + kl + ku, j); }
        void factorize();
        void solve(Eigen::MatrixXd& rhs) const;
        void solveTranspose(Eigen::MatrixXd& rhs) const;
    };
    Band band_;
    bool factorized_ = false;
};

// One-shot convenience wrapper around MincoSystem.
Trajectory constructTrajectory(const Eigen::MatrixXd& q,
                               const Eigen::VectorXd& T,
                               const BoundaryCondition& bcStart,
                               const BoundaryCondition& bcEnd,
                               int s);

} // namespace omnitraj

#endif

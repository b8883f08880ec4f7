#ifndef OMNITRAJ_LBFGS_HPP
#define OMNITRAJ_LBFGS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace omnitraj {

// Limited-memory BFGS with Armijo backtracking. Deterministic: no randomized
// restarts, fixed evaluation order. Objective callbacks may throw or return
// non-finite trial values; such steps are rejected by the line search.

struct LbfgsSettings
{
    int memory = 8;
    double gTol = 1e-5; // scaled by max(1, |x|_inf)
    int maxIterations = 1000;
    double armijoC = 1e-4;
    double shrink = 0.5;
    int maxLineSearch = 64;
};

enum class LbfgsStatus
{
    GradientTolerance,
    MaxIterations,
    LineSearchFailed,
    NonFiniteValue,
};

inline const char* statusName(LbfgsStatus s)
{
    switch (s)
    {
    case LbfgsStatus::GradientTolerance: return "gradient_tolerance";
    case LbfgsStatus::MaxIterations: return "max_iterations";
    case LbfgsStatus::LineSearchFailed: return "line_search_failed";
    case LbfgsStatus::NonFiniteValue: return "non_finite_value";
    }
    return "unknown";
}

struct LbfgsResult
{
    Eigen::VectorXd x;
    double f = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    int evaluations = 0;
    int skippedUpdates = 0;
    LbfgsStatus status = LbfgsStatus::MaxIterations;
};

using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

inline LbfgsResult lbfgsMinimize(const ObjectiveFn& fg,
                                 const Eigen::VectorXd& x0,
                                 const LbfgsSettings& settings = {})
{
    const int n = static_cast<int>(x0.size());
    LbfgsResult res;
    res.x = x0;

    auto evaluate = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) -> double
    {
        ++res.evaluations;
        try
        {
            return fg(x, grad);
        }
        catch (const std::exception&)
        {
            grad.setConstant(n, std::numeric_limits<double>::quiet_NaN());
            return std::numeric_limits<double>::infinity();
        }
    };

    Eigen::VectorXd g(n);
    double f = evaluate(res.x, g);
    if (!std::isfinite(f) || !g.allFinite())
    {
        res.f = f;
        res.status = LbfgsStatus::NonFiniteValue;
        return res;
    }

    std::vector<Eigen::VectorXd> sMem;
    std::vector<Eigen::VectorXd> yMem;
    std::vector<double> rhoMem;

    Eigen::VectorXd xNew(n);
    Eigen::VectorXd gNew(n);

    for (int iter = 0; iter < settings.maxIterations; ++iter)
    {
        const double gInf = g.lpNorm<Eigen::Infinity>();
        if (gInf <= settings.gTol * std::max(1.0, res.x.lpNorm<Eigen::Infinity>()))
        {
            res.status = LbfgsStatus::GradientTolerance;
            break;
        }

        // Two-loop recursion over the stored curvature pairs.
        Eigen::VectorXd d = -g;
        const int k = static_cast<int>(sMem.size());
        std::vector<double> alpha(k);
        for (int idx = k - 1; idx >= 0; --idx)
        {
            alpha[idx] = rhoMem[idx] * sMem[idx].dot(d);
            d -= alpha[idx] * yMem[idx];
        }
        if (k > 0)
        {
            const double gamma =
                sMem[k - 1].dot(yMem[k - 1]) / yMem[k - 1].squaredNorm();
            d *= gamma;
        }
        for (int idx = 0; idx < k; ++idx)
        {
            const double beta = rhoMem[idx] * yMem[idx].dot(d);
            d += (alpha[idx] - beta) * sMem[idx];
        }

        double dg = d.dot(g);
        if (!(dg < 0.0))
        {
            d = -g;
            dg = -g.squaredNorm();
        }

        // Backtracking Armijo search. On the very first iteration the raw
        // steepest-descent direction can be huge, so scale its trial step.
        double step = (k == 0) ? 1.0 / std::max(1.0, gInf) : 1.0;
        bool accepted = false;
        double fNew = f;
        for (int ls = 0; ls < settings.maxLineSearch; ++ls)
        {
            xNew = res.x + step * d;
            fNew = evaluate(xNew, gNew);
            if (std::isfinite(fNew) && fNew <= f + settings.armijoC * step * dg)
            {
                accepted = true;
                break;
            }
            step *= settings.shrink;
        }
        if (!accepted)
        {
            res.status = LbfgsStatus::LineSearchFailed;
            break;
        }
        if (!gNew.allFinite())
        {
            res.status = LbfgsStatus::NonFiniteValue;
            break;
        }

        const Eigen::VectorXd sVec = xNew - res.x;
        const Eigen::VectorXd yVec = gNew - g;
        const double ys = yVec.dot(sVec);
        if (ys > 1e-12 * yVec.norm() * sVec.norm())
        {
            if (static_cast<int>(sMem.size()) == settings.memory)
            {
                sMem.erase(sMem.begin());
                yMem.erase(yMem.begin());
                rhoMem.erase(rhoMem.begin());
            }
            sMem.push_back(sVec);
            yMem.push_back(yVec);
            rhoMem.push_back(1.0 / ys);
        }
        else
        {
            ++res.skippedUpdates;
        }

        res.x = xNew;
        f = fNew;
        g = gNew;
        ++res.iterations;
    }

    res.f = f;
    return res;
}

} // namespace omnitraj

#endif

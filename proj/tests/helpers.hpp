#ifndef OMNITRAJ_TEST_HELPERS_HPP
#define OMNITRAJ_TEST_HELPERS_HPP

#include <Eigen/Dense>

#include <random>

namespace testutil {

// Uniform in [lo, hi), independent of the standard library's distribution
// implementation so expected values stay frozen.
inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

inline Eigen::Vector3d randomVec(std::mt19937_64& rng, double lo, double hi)
{
    return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

inline double relErr(double a, double b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

template <typename A, typename B>
double relErr(const A& a, const B& b)
{
    return (a - b).template lpNorm<Eigen::Infinity>() /
           std::max(1.0, b.template lpNorm<Eigen::Infinity>());
}

} // namespace testutil

#endif

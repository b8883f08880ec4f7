#include "omnitraj/costs.hpp"
#include "omnitraj/minco.hpp"
#include "omnitraj/rotation.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace omnitraj;

namespace {

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Problem
{
    Eigen::MatrixXd q;
    Eigen::VectorXd T;
    BoundaryCondition bc0;
    BoundaryCondition bc1;
};

Problem makeProblem(int pieces, int s)
{
    std::mt19937_64 rng(12345);
    Problem p;
    p.q.resize(6, pieces - 1);
    for (int c = 0; c < p.q.cols(); ++c)
    {
        for (int r = 0; r < 6; ++r)
        {
            p.q(r, c) = 2.0 * uniform01(rng) - 1.0;
        }
    }
    p.T.resize(pieces);
    for (int i = 0; i < pieces; ++i)
    {
        p.T(i) = 0.8 + uniform01(rng);
    }
    p.bc0.derivs.setZero(s, 6);
    p.bc1.derivs.setZero(s, 6);
    return p;
}

} // namespace

static void BM_MincoConstruct(benchmark::State& state)
{
    const int pieces = static_cast<int>(state.range(0));
    const int s = 4;
    const Problem p = makeProblem(pieces, s);
    MincoSystem sys(s, pieces, p.bc0, p.bc1);
    for (auto _ : state)
    {
        sys.setParameters(p.q, p.T);
        benchmark::DoNotOptimize(sys.trajectory().coeffs().data());
    }
    state.SetComplexityN(pieces);
}
BENCHMARK(BM_MincoConstruct)->RangeMultiplier(2)->Range(4, 128)->Complexity(benchmark::oN);

static void BM_GradientPropagation(benchmark::State& state)
{
    const int pieces = static_cast<int>(state.range(0));
    const int s = 4;
    const Problem p = makeProblem(pieces, s);
    MincoSystem sys(s, pieces, p.bc0, p.bc1);
    sys.setParameters(p.q, p.T);
    const Eigen::MatrixXd dKdC = 2.0 * sys.trajectory().coeffs();
    const Eigen::VectorXd direct = Eigen::VectorXd::Ones(pieces);
    Eigen::MatrixXd dKdq;
    Eigen::VectorXd dKdT;
    for (auto _ : state)
    {
        sys.propagateGradient(dKdC, direct, dKdq, dKdT);
        benchmark::DoNotOptimize(dKdq.data());
    }
    state.SetComplexityN(pieces);
}
BENCHMARK(BM_GradientPropagation)->RangeMultiplier(2)->Range(4, 128)->Complexity(benchmark::oN);

static void BM_KinodynamicPenalties(benchmark::State& state)
{
    const int pieces = static_cast<int>(state.range(0));
    const int s = 4;
    const Problem p = makeProblem(pieces, s);
    const Trajectory traj = constructTrajectory(p.q, p.T, p.bc0, p.bc1, s);
    Limits limits;
    PenaltyWeights weights;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(kinodynamicPenalties(traj, limits, weights).value);
    }
    state.SetComplexityN(pieces);
}
BENCHMARK(BM_KinodynamicPenalties)->RangeMultiplier(2)->Range(4, 64)->Complexity(benchmark::oN);

static void BM_AttitudeDerivs(benchmark::State& state)
{
    std::mt19937_64 rng(7);
    const Eigen::Vector3d sigma(uniform01(rng), uniform01(rng), uniform01(rng));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(attitudeDerivs(sigma).dR[0].data());
    }
}
BENCHMARK(BM_AttitudeDerivs);

BENCHMARK_MAIN();

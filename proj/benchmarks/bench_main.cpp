#include <benchmark/benchmark.h>

#include "ospectra/operator.hpp"
#include "ospectra/orlicz.hpp"
#include "ospectra/solver.hpp"

using namespace ospectra;

namespace {

AssembledProblem problem(YoungFunction f, int k) {
    return AssembledProblem::build(-1.0, 1.0, k, 0.5, f, GrowthFunction::from_young(f));
}

void BM_PairQuadrature(benchmark::State& state) {
    const Basis basis = build_mesh(-1.0, 1.0, static_cast<int>(state.range(0)), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(build_pair_quadrature(basis, {}));
}
BENCHMARK(BM_PairQuadrature)->Arg(15)->Arg(31)->Arg(63)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
    const YoungFunction f = YoungFunction::power(2.0);
    for (auto _ : state) benchmark::DoNotOptimize(problem(f, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Assemble)->Arg(15)->Arg(31)->Unit(benchmark::kMillisecond);

template <int Kind>
void BM_EvaluateAll(benchmark::State& state) {
    const YoungFunction f = Kind == 0 ? YoungFunction::power(1.5)
                          : Kind == 1 ? YoungFunction::power(3.0)
                                      : YoungFunction::exp_minus_linear();
    const AssembledProblem prob = problem(f, static_cast<int>(state.range(0)));
    const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(prob.dim(), 0.1, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_all(prob, u));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(prob.node_count()));
}
BENCHMARK_TEMPLATE(BM_EvaluateAll, 0)->Arg(31);
BENCHMARK_TEMPLATE(BM_EvaluateAll, 1)->Arg(31);
BENCHMARK_TEMPLATE(BM_EvaluateAll, 2)->Arg(31);

void BM_Luxemburg(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> w(n, 1.0 / static_cast<double>(n)), u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(0.37 * static_cast<double>(i));
    const DiscreteMeasure mu(w, MeasureTag::Lebesgue1D);
    const YoungFunction f = YoungFunction::exp_minus_linear();
    for (auto _ : state) benchmark::DoNotOptimize(luxemburg_norm(f, u, mu));
}
BENCHMARK(BM_Luxemburg)->Arg(1000)->Arg(100000);

void BM_SolveFirst(benchmark::State& state) {
    const YoungFunction f = state.range(1) == 2 ? YoungFunction::power(2.0) : YoungFunction::power(3.0);
    const AssembledProblem prob = problem(f, static_cast<int>(state.range(0)));
    SolverConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(solve_first(prob, cfg));
}
BENCHMARK(BM_SolveFirst)->Args({15, 2})->Args({31, 2})->Args({15, 3})->Unit(benchmark::kMillisecond);

void BM_SolveLevel2(benchmark::State& state) {
    const AssembledProblem prob = problem(YoungFunction::power(3.0), 15);
    SolverConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(solve_level(prob, 2, cfg));
}
BENCHMARK(BM_SolveLevel2)->Unit(benchmark::kMillisecond)->Iterations(1);

} // namespace

BENCHMARK_MAIN();

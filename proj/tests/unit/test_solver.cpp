#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "ospectra/errors.hpp"
#include "ospectra/solver.hpp"

using namespace ospectra;
using Eigen::VectorXd;

namespace {

AssembledProblem make(const YoungFunction& f, int k, double s = 0.5) {
    return AssembledProblem::build(-1.0, 1.0, k, s, f, GrowthFunction::from_young(f));
}

Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(const AssembledProblem& p) {
    return {p.linear_stiffness(), p.mass_matrix()};
}

void expect_critical_point(const AssembledProblem& prob, const Eigenpair& e, const SolverConfig& cfg) {
    EXPECT_NEAR(modular_Ms(prob, e.u), 1.0, 1e-8);
    EXPECT_LE(weak_residual(prob, e.lambda, e.u), cfg.kkt_tol);
    EXPECT_EQ(e.c_value, potential_G(prob, e.u));
    EXPECT_GT(e.lambda, 0.0);
}

} // namespace

TEST(Normalize, Examples) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    for (const auto& f : {YoungFunction::power(2.0), YoungFunction::exp_minus_linear(), YoungFunction::power(1.5)}) {
        const auto prob = make(f, 7);
        VectorXd u(7);
        for (int j = 0; j < 7; ++j) u[j] = n(rng);
        const VectorXd v = normalize_to_manifold(prob, u);
        EXPECT_NEAR(modular_Ms(prob, v), 1.0, 1e-10) << f.label();
        EXPECT_LE((normalize_to_manifold(prob, v) - v).norm(), 1e-10 * v.norm());
    }
    const auto lin = make(YoungFunction::power(2.0), 7);
    const VectorXd u = VectorXd::LinSpaced(7, 0.1, 0.7);
    const VectorXd v = normalize_to_manifold(lin, u);
    EXPECT_NEAR(v[0] / u[0], std::pow(modular_Ms(lin, u), -0.5), 1e-9);
    EXPECT_THROW(normalize_to_manifold(lin, VectorXd::Zero(7)), InputError);
}

TEST(SolveFirst, LinearOracle) {
    const auto prob = make(YoungFunction::power(2.0), 31);
    SolverConfig cfg;
    const Eigenpair e = solve_first(prob, cfg);
    const auto es = dense(prob);
    EXPECT_NEAR(e.lambda / es.eigenvalues()[0], 1.0, 1e-6);
    expect_critical_point(prob, e, cfg);
    EXPECT_GE(e.u.sum(), 0.0);
}

TEST(SolveFirst, SingleNode) {
    const auto f = YoungFunction::power(3.0);
    const auto prob = make(f, 1);
    SolverConfig cfg;
    const Eigenpair e = solve_first(prob, cfg);
    const VectorXd u = normalize_to_manifold(prob, VectorXd::Ones(1));
    const double direct = grad_Ms(prob, u).dot(u) / grad_G(prob, u).dot(u);
    EXPECT_NEAR(e.lambda, direct, 1e-12 * direct);
    EXPECT_NEAR(e.u[0], u[0], 1e-12);
}

TEST(SolveFirst, EvenUnderStartReflection) {
    const auto prob = make(YoungFunction::power(3.0), 7);
    SolverConfig cfg;
    const VectorXd u0 = VectorXd::LinSpaced(7, 0.2, 1.0).cwiseProduct(VectorXd::LinSpaced(7, 1.0, 0.3));
    const std::vector<VectorXd> plus{u0}, minus{VectorXd(-u0)};
    const Eigenpair a = solve_first(prob, cfg, plus), b = solve_first(prob, cfg, minus);
    EXPECT_NEAR(a.lambda, b.lambda, 1e-10 * a.lambda);
    EXPECT_NEAR(a.c_value, b.c_value, 1e-10 * a.c_value);
}

TEST(SolveLevel, LevelOneAgreesWithFirst) {
    const auto prob = make(YoungFunction::power(3.0), 7);
    SolverConfig cfg;
    const Eigenpair a = solve_first(prob, cfg), b = solve_level(prob, 1, cfg);
    EXPECT_NEAR(a.lambda, b.lambda, 1e-6 * a.lambda);
    EXPECT_NEAR(a.c_value, b.c_value, 1e-6 * a.c_value);
}

TEST(SolveLevel, LinearSecondLevel) {
    const auto prob = make(YoungFunction::power(2.0), 31);
    SolverConfig cfg;
    const Eigenpair e = solve_level(prob, 2, cfg);
    EXPECT_NEAR(e.lambda / dense(prob).eigenvalues()[1], 1.0, 1e-4);
    expect_critical_point(prob, e, cfg);
}

TEST(SolveLevel, LevelExceedsDimension) {
    const auto prob = make(YoungFunction::power(2.0), 3);
    SolverConfig cfg;
    EXPECT_THROW(solve_level(prob, 4, cfg), LevelError);
    EXPECT_THROW(solve_level(prob, 0, cfg), InputError);
}

TEST(SolveLevel, NonlinearLevelsAreCriticalAndOrdered) {
    SolverConfig cfg;
    for (const auto& f : {YoungFunction::power(3.0), YoungFunction::exp_minus_linear()}) {
        const auto prob = make(f, 7);
        double prev_c = INFINITY;
        for (int i = 1; i <= 3; ++i) {
            const Eigenpair e = solve_level(prob, i, cfg);
            expect_critical_point(prob, e, cfg);
            EXPECT_LE(e.minimax_value, prev_c + 1e-6) << f.label() << " i=" << i;
            prev_c = e.minimax_value;
        }
    }
}

TEST(SolveLevel, LinearGrowthTrend) {
    const auto prob = make(YoungFunction::power(2.0), 63);
    SolverConfig cfg;
    std::vector<double> lambda;
    for (int i = 1; i <= 5; ++i) lambda.push_back(solve_level(prob, i, cfg).lambda);
    for (std::size_t i = 1; i < lambda.size(); ++i) EXPECT_GT(lambda[i], lambda[i - 1]);
    EXPECT_GT(lambda[4] / lambda[0], 3.0);
}

TEST(KktRefine, OracleFixedPoint) {
    const auto prob = make(YoungFunction::power(2.0), 15);
    const auto es = dense(prob);
    SolverConfig cfg;
    const VectorXd v = normalize_to_manifold(prob, es.eigenvectors().col(0));
    const Eigenpair e = kkt_refine(prob, v, cfg);
    EXPECT_LE(e.iterations, 2);
    EXPECT_NEAR(e.lambda, es.eigenvalues()[0], 1e-8 * es.eigenvalues()[0]);
}

TEST(KktRefine, SingleNodeImmediate) {
    const auto prob = make(YoungFunction::exp_minus_linear(), 1);
    SolverConfig cfg;
    const Eigenpair e = kkt_refine(prob, normalize_to_manifold(prob, VectorXd::Ones(1)), cfg);
    EXPECT_LE(e.iterations, 1);
    EXPECT_GT(e.lambda, 0.0);
}

TEST(KktRefine, ReportsNonConvergence) {
    const auto prob = make(YoungFunction::power(3.0), 15);
    SolverConfig cfg;
    cfg.newton_max = 1;
    cfg.kkt_tol = 1e-15;
    VectorXd u = VectorXd::LinSpaced(15, -1.0, 2.0);
    try {
        kkt_refine(prob, u, cfg);
        FAIL() << "expected a convergence error";
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.best_iterate().size(), 15);
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(Continuation, MonotoneLevelsAndCauchyEigenvalues) {
    std::vector<AssembledProblem> family;
    for (int k : {7, 15, 31, 63}) family.push_back(make(YoungFunction::power(2.0), k));
    SolverConfig cfg;
    const auto steps = continuation(family, 1, cfg);
    ASSERT_EQ(steps.size(), 4u);
    for (const auto& s : steps) ASSERT_TRUE(s.pair.has_value()) << s.error;
    for (std::size_t i = 1; i < steps.size(); ++i)
        EXPECT_GE(steps[i].pair->c_value, steps[i - 1].pair->c_value * (1.0 - 1e-6));
    const double l15 = steps[1].pair->lambda, l31 = steps[2].pair->lambda, l63 = steps[3].pair->lambda;
    EXPECT_LT(std::abs(l63 - l31), std::abs(l31 - l15));
}

TEST(Continuation, RejectsNonNestedFamily) {
    std::vector<AssembledProblem> family{make(YoungFunction::power(2.0), 7), make(YoungFunction::power(2.0), 9)};
    EXPECT_THROW(continuation(family, 1, SolverConfig{}), InputError);
}

TEST(Determinism, IdenticalSeedsIdenticalOutput) {
    const auto prob = make(YoungFunction::power(3.0), 7);
    SolverConfig cfg;
    cfg.rng_seed = 99;
    const Eigenpair a = solve_level(prob, 2, cfg), b = solve_level(prob, 2, cfg);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_EQ(a.u, b.u);
}

TEST(Config, Validation) {
    SolverConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.kkt_tol = 0.0;
    EXPECT_THROW(cfg.validate(), InputError);
    cfg = {};
    cfg.restarts = 0;
    EXPECT_THROW(cfg.validate(), InputError);
}

TEST(SignConvention, NonnegativeSum) {
    VectorXd u(3);
    u << -1.0, 0.5, -0.2;
    EXPECT_GE(sign_normalized(u).sum(), 0.0);
    u << 1.0, 0.0, -1.0;
    EXPECT_GT(sign_normalized(u)[0], 0.0);
    u << -1.0, 0.0, 1.0;
    EXPECT_GT(sign_normalized(u)[0], 0.0);
}

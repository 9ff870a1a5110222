#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "ospectra/errors.hpp"
#include "ospectra/mesh.hpp"
#include "ospectra/operator.hpp"
#include "ospectra/orlicz.hpp"

using namespace ospectra;

TEST(BuildMesh, Examples) {
    const Basis one = build_mesh(-1.0, 1.0, 1, 0.5);
    ASSERT_EQ(one.size(), 1);
    EXPECT_DOUBLE_EQ(one.mesh().nodes()[0], 0.0);
    EXPECT_DOUBLE_EQ(one.value(0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(one.value(0, -0.5), 0.5);
    EXPECT_EQ(one.value(0, 1.5), 0.0);

    const Basis three = build_mesh(-1.0, 1.0, 3, 0.5);
    EXPECT_EQ(three.mesh().nodes(), (std::vector<double>{-0.5, 0.0, 0.5}));
    EXPECT_DOUBLE_EQ(three.mesh().h(), 0.5);
}

TEST(BuildMesh, Validation) {
    EXPECT_THROW(build_mesh(-1.0, 1.0, 0, 0.5), InputError);
    EXPECT_THROW(build_mesh(-1.0, 1.0, 3, 0.0), InputError);
    EXPECT_THROW(build_mesh(-1.0, 1.0, 3, 1.0), InputError);
    EXPECT_THROW(build_mesh(1.0, -1.0, 3, 0.5), InputError);
}

TEST(BuildMesh, SpanNesting) {
    const Basis coarse = build_mesh(-1.0, 1.0, 3, 0.5);
    const Basis fine = coarse.refined();
    ASSERT_EQ(fine.size(), 7);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> x(-1.2, 1.2);
    for (int j = 0; j < coarse.size(); ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
        e[j] = 1.0;
        const Eigen::VectorXd c = coarse.prolongate(e);
        for (int n = 0; n < 1000; ++n) {
            const double t = x(rng);
            EXPECT_NEAR(fine.evaluate(c, t), coarse.value(j, t), 1e-15);
        }
    }
}

TEST(HolderQuotient, Examples) {
    const Basis hat = build_mesh(-1.0, 1.0, 1, 0.5);
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(1);
    EXPECT_DOUBLE_EQ(holder_quotient(u, hat, 0.0, 1.0), 1.0);
    EXPECT_NEAR(holder_quotient(u, hat, 0.0, 0.5), 0.5 / std::sqrt(0.5), 1e-15);
    EXPECT_EQ(holder_quotient(u, hat, 2.0, 3.0), 0.0);
    EXPECT_THROW(holder_quotient(u, hat, 0.3, 0.3), InputError);
}

TEST(Gauss, ExactForPolynomials) {
    for (int n : {1, 2, 5, 8, 20}) {
        const auto& g = gauss_legendre(n);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double sum = 0.0;
            for (std::size_t i = 0; i < g.x.size(); ++i) sum += g.w[i] * std::pow(g.x[i], d);
            const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
            EXPECT_NEAR(sum, exact, 1e-14) << "n=" << n << " d=" << d;
        }
    }
    EXPECT_THROW(gauss_legendre(0), InputError);
}

TEST(PairQuadrature, Invariants) {
    const Basis b = build_mesh(-1.0, 1.0, 7, 0.5);
    const PairQuadrature q = build_pair_quadrature(b, 2.0, 40.0, 8);
    ASSERT_EQ(q.size(), 2 * q.canonical_count());
    for (const PairNode& n : q.nodes()) {
        EXPECT_GT(n.weight, 0.0);
        EXPECT_NE(n.x, n.y);
        const bool xin = n.x > -1.0 && n.x < 1.0, yin = n.y > -1.0 && n.y < 1.0;
        if (n.region == PairRegion::Exterior)
            EXPECT_NE(xin, yin);
        else
            EXPECT_TRUE(xin && yin);
    }
}

TEST(PairQuadrature, FarCellMassMatchesAdaptiveOracle) {
    const Basis b = build_mesh(-1.0, 1.0, 3, 0.5);
    const PairQuadrature q = build_pair_quadrature(b, {});
    double mass = 0.0;
    for (const PairNode& n : q.nodes())
        if (n.x >= 0.0 && n.x <= 0.5 && n.y >= -1.0 && n.y <= -0.5) mass += n.weight;
    // Inner integral over y in closed form, outer one adaptive.
    auto inner = [](double x) { return std::log(x + 1.0) - std::log(x + 0.5); };
    double err = 0.0;
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(inner, 0.0, 0.5, 15, 1e-14, &err);
    EXPECT_NEAR(mass, oracle, 1e-8);
}

TEST(PairQuadrature, SymmetricUnderSwap) {
    const Basis b = build_mesh(-1.0, 1.0, 7, 0.3);
    const PairQuadrature q = build_pair_quadrature(b, {});
    auto F = [](double x, double y) { return std::exp(-x * x - y * y) * std::cos(x * y); };
    double direct = 0.0, swapped = 0.0;
    for (const PairNode& n : q.nodes()) {
        direct += n.weight * F(n.x, n.y);
        swapped += n.weight * F(n.y, n.x);
    }
    EXPECT_NEAR(direct, swapped, 1e-12 * std::abs(direct));
}

namespace {

double hat_modular(int order, double R, double s = 0.5, int k = 7) {
    const auto f = YoungFunction::power(2.0);
    PairQuadratureOptions opts;
    opts.order = order;
    opts.exterior_radius = R;
    const AssembledProblem prob = AssembledProblem::build(-1.0, 1.0, k, s, f, GrowthFunction::from_young(f), opts);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(k);
    u[0] = 1.0;
    return modular_Ms(prob, u);
}

} // namespace

TEST(PairQuadrature, SelfConvergenceInOrder) {
    const double a = hat_modular(8, 0.0), b = hat_modular(16, 0.0);
    EXPECT_LT(std::abs(a - b), 1e-6 * b);
}

TEST(PairQuadrature, ExteriorTailInsensitiveToRadius) {
    const double a = hat_modular(8, 20.0), b = hat_modular(8, 40.0);
    EXPECT_LT(std::abs(a - b), 1e-6 * b);
}

TEST(PairQuadrature, RejectsBadOptions) {
    const Basis b = build_mesh(-1.0, 1.0, 3, 0.5);
    EXPECT_THROW(build_pair_quadrature(b, 0.5, 10.0, 8), InputError);
    EXPECT_THROW(build_pair_quadrature(b, 2.0, -1.0, 8), InputError);
    EXPECT_THROW(build_pair_quadrature(b, 2.0, 10.0, 0), InputError);
}

TEST(Poincare, RatioStableAcrossK) {
    // max over random u of |u|_{M,dx} / |D^s u|_{M,nu}, for k = 7, 15, 31.
    const auto f = YoungFunction::power(2.0);
    std::vector<double> ratios;
    for (int k : {7, 15, 31}) {
        const AssembledProblem prob =
            AssembledProblem::build(-1.0, 1.0, k, 0.5, f, GrowthFunction::from_young(f));
        std::mt19937_64 rng(3);
        std::normal_distribution<double> n(0.0, 1.0);
        const auto& g = gauss_legendre(4);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            // Interpolated low-frequency sine series: the same random family on every mesh.
            double a[4];
            for (double& c : a) c = n(rng);
            Eigen::VectorXd u(k);
            for (int j = 0; j < k; ++j) {
                const double x = prob.basis().mesh().nodes()[j];
                u[j] = 0.0;
                for (int m = 0; m < 4; ++m) u[j] += a[m] * std::sin((m + 1) * M_PI * (x + 1.0) / 2.0);
            }
            std::vector<double> vals, w;
            const Mesh& mesh = prob.basis().mesh();
            for (int e = 0; e <= k; ++e)
                for (std::size_t q = 0; q < g.x.size(); ++q) {
                    const double x = mesh.point(e) + 0.5 * mesh.h() * (1.0 + g.x[q]);
                    vals.push_back(prob.basis().evaluate(u, x));
                    w.push_back(0.5 * mesh.h() * g.w[q]);
                }
            std::vector<double> D;
            prob.holder_values(u, D);
            const double lhs = luxemburg_norm(f, vals, DiscreteMeasure(w, MeasureTag::Lebesgue1D));
            const double rhs = luxemburg_norm(f, D, DiscreteMeasure(prob.folded_weights(), MeasureTag::PairNu));
            worst = std::max(worst, lhs / rhs);
        }
        ratios.push_back(worst);
    }
    for (std::size_t i = 1; i < ratios.size(); ++i)
        EXPECT_LT(std::abs(ratios[i] / ratios[i - 1] - 1.0), 0.2) << ratios[i - 1] << " -> " << ratios[i];
}

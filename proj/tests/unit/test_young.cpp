#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ospectra/errors.hpp"
#include "ospectra/young.hpp"

using namespace ospectra;

namespace {

const double e = std::exp(1.0);

std::vector<YoungFunction> catalogue() {
    return {YoungFunction::power(1.5), YoungFunction::power(2.0), YoungFunction::power(3.0),
            YoungFunction::exp_minus_linear(),
            YoungFunction::custom({{{0.5, 0.4}, {1.0, 1.0}, {2.0, 3.0}, {4.0, 9.0}}})};
}

} // namespace

TEST(EvalM, ClosedForms) {
    EXPECT_DOUBLE_EQ(eval_M(YoungFunction::power(2.0), 2.0), 2.0);
    EXPECT_NEAR(eval_M(YoungFunction::exp_minus_linear(), 1.0), e - 2.0, 1e-15);
    EXPECT_NEAR(eval_M(YoungFunction::exp_minus_linear(), -1.0), e - 2.0, 1e-15);
    for (const auto& f : catalogue()) EXPECT_EQ(eval_M(f, 0.0), 0.0) << f.label();
}

TEST(EvalM, RejectsNonFinite) {
    const auto f = YoungFunction::power(2.0);
    EXPECT_THROW(eval_M(f, std::nan("")), InputError);
    EXPECT_THROW(eval_M(f, INFINITY), InputError);
    EXPECT_THROW(eval_m_signed(f, -INFINITY), InputError);
}

TEST(EvalM, QuadratureMatchesClosedForm) {
    const auto f = YoungFunction::from_density([](double t) { return std::expm1(t); }, "numeric-exp");
    EXPECT_FALSE(f.closed_form());
    for (double t : {1e-3, 0.1, 1.0, 5.0, 20.0}) {
        const double exact = std::expm1(t) - t;
        EXPECT_NEAR(eval_M(f, t), exact, 1e-10 * exact) << t;
    }
}

TEST(EvalMSigned, OddExtension) {
    EXPECT_EQ(eval_m_signed(YoungFunction::power(2.0), -3.0), -3.0);
    EXPECT_NEAR(eval_m_signed(YoungFunction::exp_minus_linear(), -1.0), -(e - 1.0), 1e-15);
    for (const auto& f : catalogue()) EXPECT_EQ(eval_m_signed(f, 0.0), 0.0);
}

TEST(Conjugate, ClosedForms) {
    const auto q = conjugate(YoungFunction::power(2.0));
    EXPECT_EQ(q.kind(), YoungKind::Power);
    EXPECT_DOUBLE_EQ(*q.exponent(), 2.0);
    EXPECT_DOUBLE_EQ(q.M(2.0), 2.0);
    EXPECT_DOUBLE_EQ(*conjugate(YoungFunction::power(3.0)).exponent(), 1.5);
    EXPECT_NEAR(conjugate(YoungFunction::exp_minus_linear()).M(e - 1.0), 1.0, 1e-14);
}

TEST(Conjugate, Involution) {
    for (const auto& f : catalogue()) {
        const auto ff = f.conjugate().conjugate();
        for (double t : {0.1, 1.0, 10.0}) EXPECT_NEAR(ff.M(t), f.M(t), 1e-8) << f.label() << " t=" << t;
    }
}

TEST(Conjugate, InvolutionOnLogGrid) {
    for (const auto& f : catalogue()) {
        const auto ff = f.conjugate().conjugate();
        for (double t = 1e-3; t <= 20.0; t *= 1.7) EXPECT_NEAR(ff.M(t), f.M(t), 1e-6 * (1.0 + f.M(t))) << f.label();
    }
}

TEST(Conjugate, NumericInverseOfTable) {
    // m(t) = t on the table, so the conjugate density is the identity too.
    const auto f = YoungFunction::custom({{{1.0, 1.0}, {2.0, 2.0}}});
    const auto c = f.conjugate();
    EXPECT_FALSE(c.closed_form());
    for (double tau : {0.25, 1.0, 3.0}) {
        EXPECT_NEAR(c.m(tau), tau, 1e-11 * tau);
        EXPECT_NEAR(c.M(tau), 0.5 * tau * tau, 1e-10 * tau * tau);
    }
}

TEST(Delta2, PowerSatisfied) {
    const auto r2 = check_delta2(YoungFunction::power(2.0), 1e3);
    EXPECT_TRUE(r2.satisfied);
    ASSERT_TRUE(r2.witness_C.has_value());
    EXPECT_NEAR(*r2.witness_C, 4.0, 1e-12);
    const auto r15 = check_delta2(YoungFunction::power(1.5), 1e3);
    EXPECT_TRUE(r15.satisfied);
    EXPECT_NEAR(*r15.witness_C, std::pow(2.0, 1.5), 1e-12);
    EXPECT_EQ(r15.grid.size(), r15.ratios.size());
}

TEST(Delta2, ExpUnsatisfied) {
    const auto r = check_delta2(YoungFunction::exp_minus_linear(), 50.0);
    EXPECT_FALSE(r.satisfied);
    EXPECT_FALSE(r.witness_C.has_value());
    // Independent evaluation of the ratio at t = 50 from the closed form.
    const double ratio50 = (std::exp(100.0) - 101.0) / (std::exp(50.0) - 51.0);
    EXPECT_NEAR(r.ratios.back() / ratio50, 1.0, 1e-12);
    EXPECT_GT(r.ratios.back(), 1e3 * r.ratios.front());
}

TEST(Delta2, RejectsSmallRange) { EXPECT_THROW(check_delta2(YoungFunction::power(2.0), 1.0), InputError); }

TEST(YoungGap, Examples) {
    const auto f = YoungFunction::power(2.0);
    EXPECT_EQ(young_gap(f, 0.0, 0.0), 0.0);
    EXPECT_NEAR(young_gap(f, 1.0, f.m(1.0)), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(young_gap(f, 1.0, 3.0), 2.0);
    EXPECT_THROW(young_gap(f, -1.0, 1.0), InputError);
}

TEST(YoungGap, RandomSweep) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (const auto& f : catalogue()) {
        if (f.kind() == YoungKind::ExpMinusLinear) continue; // overflows on [0, 100]^2
        const auto fbar = f.conjugate();
        for (int i = 0; i < 1000; ++i) {
            const double t = u(rng), tau = u(rng);
            EXPECT_GE(young_gap(f, fbar, t, tau), -1e-10 * (1.0 + t * tau)) << f.label();
        }
        for (int i = 0; i < 100; ++i) {
            const double t = u(rng);
            EXPECT_LE(std::abs(young_gap(f, fbar, t, f.m(t))), 1e-6 * (1.0 + f.M(t))) << f.label();
        }
    }
}

TEST(YoungGap, ExpOnModerateRange) {
    const auto f = YoungFunction::exp_minus_linear();
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    for (int i = 0; i < 1000; ++i) {
        const double t = u(rng), tau = u(rng);
        EXPECT_GE(young_gap(f, t, tau), -1e-10 * (1.0 + t * tau));
        EXPECT_LE(std::abs(young_gap(f, t, f.m(t))), 1e-6 * (1.0 + f.M(t)));
    }
}

TEST(Properties, MonotoneDensityAndConvexity) {
    for (const auto& f : catalogue()) {
        for (double a = 1e-3; a < 50.0; a *= 1.9)
            for (double b = 1e-3; b < 50.0; b *= 2.3) EXPECT_GE((f.m(a) - f.m(b)) * (a - b), 0.0);
        for (double t = 0.0; t < 50.0; t += 0.37) EXPECT_GE(f.m(t) * t, f.M(t) * (1.0 - 1e-14));
    }
}

TEST(Properties, Diagnostics) {
    for (const auto& f : catalogue()) EXPECT_TRUE(check_young(f).ok()) << f.label();
    const auto bad = check_young(YoungFunction::custom({{{1.0, 1.0}, {2.0, 0.5}, {3.0, 4.0}}}));
    EXPECT_FALSE(bad.monotone);
    EXPECT_GT(bad.worst_monotone_violation, 0.0);
}

TEST(Table, Validation) {
    EXPECT_THROW(YoungFunction::custom({}), InputError);
    EXPECT_THROW(YoungFunction::custom({{{1.0, 0.0}}}), InputError);
    EXPECT_THROW(YoungFunction::custom({{{0.0, 1.0}, {1.0, 1.0}}}), InputError);
    EXPECT_THROW(YoungFunction::custom({{{1.0, 1.0}, {1.0, 2.0}}}), InputError);
    EXPECT_THROW(YoungFunction::custom({{{1.0, NAN}}}), InputError);
    const auto f = YoungFunction::custom({{{1.0, 2.0}, {2.0, 3.0}}});
    EXPECT_DOUBLE_EQ(f.m(0.5), 1.0);
    EXPECT_DOUBLE_EQ(f.m(4.0), 5.0); // linear extrapolation of the last segment
    EXPECT_DOUBLE_EQ(f.M(1.0), 1.0);
    EXPECT_DOUBLE_EQ(f.M(2.0), 3.5);
}

TEST(Table, Kinks) {
    const auto f = YoungFunction::custom({{{1.0, 2.0}, {2.0, 3.0}}});
    EXPECT_EQ(f.kinks(), (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(f.scaled(3.0, 2.0).kinks(), (std::vector<double>{0.5, 1.0}));
    EXPECT_EQ(f.conjugate().kinks(), (std::vector<double>{2.0, 3.0}));
    EXPECT_TRUE(YoungFunction::power(3.0).kinks().empty());
    EXPECT_EQ(GrowthFunction::from_young(f).kinks().size(), 2u);
    EXPECT_TRUE(GrowthFunction::power(3.0).kinks().empty());
}

TEST(Scaled, ConjugateOfScaling) {
    const auto f = YoungFunction::power(3.0).scaled(2.0, 0.5);
    EXPECT_NEAR(f.M(2.0), 2.0 * std::pow(1.0, 3.0) / 3.0, 1e-15);
    const auto c = f.conjugate();
    for (double tau : {0.3, 1.0, 2.5}) EXPECT_GE(young_gap(f, c, 1.0, tau), -1e-12);
    EXPECT_NEAR(young_gap(f, c, 1.7, f.m(1.7)), 0.0, 1e-12);
}

TEST(Growth, DefaultsAndPower) {
    const auto f = YoungFunction::power(2.0);
    const auto g = GrowthFunction::from_young(f);
    EXPECT_TRUE(g.is_linear());
    EXPECT_EQ(g.g(-2.0), -2.0);
    EXPECT_EQ(g.G(-2.0), 2.0);
    EXPECT_TRUE(check_growth(g, f).ok());

    const auto q = GrowthFunction::power(1.5);
    EXPECT_NEAR(q.g(4.0), 2.0, 1e-15);
    EXPECT_NEAR(q.g(-4.0), -2.0, 1e-15);
    EXPECT_NEAR(q.G(4.0), 8.0 / 1.5, 1e-14);
    EXPECT_FALSE(q.is_linear());
    // |t|^{1/2} > t below 1, so the bound needs a1 > 0.
    EXPECT_FALSE(check_growth(q, f).ok());
    EXPECT_TRUE(check_growth(GrowthFunction::power(1.5, {1.0, 1.0, 1.0}), f).ok());
}

TEST(Growth, ViolationDetected) {
    const auto f = YoungFunction::power(1.5);
    const auto r = check_growth(GrowthFunction::power(3.0), f);
    EXPECT_FALSE(r.ok());
    EXPECT_GT(r.bound_failures, 0);
    EXPECT_LT(r.worst_margin, 0.0);
}

TEST(Growth, RejectsBadConstants) {
    const auto f = YoungFunction::power(2.0);
    EXPECT_THROW(GrowthFunction::from_young(f, {-1.0, 1.0, 1.0}), InputError);
    EXPECT_THROW(GrowthFunction::from_young(f, {0.0, 0.0, 1.0}), InputError);
    EXPECT_THROW(GrowthFunction::power(1.0), InputError);
}

TEST(Bulk, MatchesScalar) {
    std::vector<double> t{-3.0, -0.5, 0.0, 1e-4, 0.7, 2.0, 9.0}, a(t.size()), b(t.size());
    for (const auto& f : catalogue()) {
        f.M_many(t, a);
        f.m_signed_many(t, b);
        for (std::size_t i = 0; i < t.size(); ++i) {
            EXPECT_NEAR(a[i], f.M(t[i]), 1e-14 * (1.0 + f.M(t[i])));
            EXPECT_NEAR(b[i], f.m_signed(t[i]), 1e-14 * (1.0 + std::abs(f.m_signed(t[i]))));
        }
    }
}

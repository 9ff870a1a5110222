#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ospectra/errors.hpp"
#include "ospectra/orlicz.hpp"

using namespace ospectra;

namespace {

DiscreteMeasure uniform(std::size_t n, double mass) {
    return DiscreteMeasure(std::vector<double>(n, mass / static_cast<double>(n)), MeasureTag::Lebesgue1D);
}

std::vector<YoungFunction> catalogue() {
    return {YoungFunction::power(1.5), YoungFunction::power(2.0), YoungFunction::power(3.0),
            YoungFunction::exp_minus_linear()};
}

} // namespace

TEST(Measure, RejectsNonPositiveWeights) {
    EXPECT_THROW(DiscreteMeasure({1.0, 0.0}, MeasureTag::Lebesgue1D), InputError);
    EXPECT_THROW(DiscreteMeasure({1.0, -1.0}, MeasureTag::PairNu), InputError);
    EXPECT_THROW(DiscreteMeasure({INFINITY}, MeasureTag::PairNu), InputError);
    EXPECT_DOUBLE_EQ(DiscreteMeasure({0.5, 1.5}, MeasureTag::PairNu).total_mass(), 2.0);
}

TEST(Modular, Examples) {
    const auto f = YoungFunction::power(2.0);
    const auto mu = uniform(4, 2.0);
    EXPECT_EQ(modular(f, std::vector<double>(4, 0.0), mu), 0.0);
    EXPECT_DOUBLE_EQ(modular(f, std::vector<double>(4, 1.0), mu), 1.0);
    EXPECT_THROW(modular(f, std::vector<double>(3, 1.0), mu), InputError);
}

TEST(Modular, ExtendedPrecisionOracle) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> w(0.01, 1.0);
    std::vector<double> u(1000), weights(1000);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = n(rng);
        weights[i] = w(rng);
    }
    const DiscreteMeasure mu(weights, MeasureTag::Lebesgue1D);
    for (const auto& f : catalogue()) {
        long double ref = 0.0L;
        for (std::size_t i = 0; i < u.size(); ++i) ref += static_cast<long double>(weights[i]) * f.M(u[i]);
        EXPECT_NEAR(modular(f, u, mu), static_cast<double>(ref), 1e-12 * static_cast<double>(ref)) << f.label();
    }
}

TEST(Luxemburg, Examples) {
    const auto f = YoungFunction::power(2.0);
    const auto mu = uniform(5, 1.0);
    EXPECT_EQ(luxemburg_norm(f, std::vector<double>(5, 0.0), mu), 0.0);
    const double c = 3.0;
    EXPECT_NEAR(luxemburg_norm(f, std::vector<double>(5, c), mu), c / std::sqrt(2.0), 1e-10 * c);
}

TEST(Luxemburg, DefiningEquationAndInvariants) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 2.0);
    std::uniform_real_distribution<double> w(0.05, 1.0), a(-10.0, 10.0);
    for (const auto& f : catalogue()) {
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t len = 20 + static_cast<std::size_t>(trial);
            std::vector<double> u(len), v(len), weights(len), sum(len), scaled(len), unit(len);
            const double alpha = a(rng);
            for (std::size_t i = 0; i < len; ++i) {
                u[i] = n(rng);
                v[i] = n(rng);
                weights[i] = w(rng);
                sum[i] = u[i] + v[i];
                scaled[i] = alpha * u[i];
            }
            const DiscreteMeasure mu(weights, MeasureTag::Lebesgue1D);
            const double nu = luxemburg_norm(f, u, mu);
            for (std::size_t i = 0; i < len; ++i) unit[i] = u[i] / nu;
            EXPECT_NEAR(modular(f, unit, mu), 1.0, 1e-8) << f.label();
            EXPECT_LE(modular(f, unit, mu), 1.0 + 1e-8);
            EXPECT_NEAR(luxemburg_norm(f, scaled, mu), std::abs(alpha) * nu, 1e-9 * std::abs(alpha) * nu);
            EXPECT_LE(luxemburg_norm(f, sum, mu), nu + luxemburg_norm(f, v, mu) + 1e-8);
        }
    }
}

TEST(Luxemburg, MonotoneInYoungFunction) {
    // e^t - t - 1 >= t^2 / 2 for every t >= 0.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto small = YoungFunction::power(2.0), large = YoungFunction::exp_minus_linear();
    const auto mu = uniform(16, 0.1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(16);
        for (double& v : x) v = u(rng);
        EXPECT_LE(luxemburg_norm(small, x, mu), luxemburg_norm(large, x, mu) + 1e-8);
    }
}

TEST(Holder, Examples) {
    const auto f = YoungFunction::power(2.0);
    const auto mu = uniform(3, 1.0);
    const std::vector<double> zero(3, 0.0), one(3, 1.0);
    const auto r0 = holder_pairing_check(f, zero, one, mu);
    EXPECT_EQ(r0.lhs, 0.0);
    EXPECT_EQ(r0.rhs, 0.0);
    EXPECT_TRUE(r0.ok);
    const auto r1 = holder_pairing_check(f, one, one, mu);
    EXPECT_NEAR(r1.lhs, 1.0, 1e-15);
    EXPECT_NEAR(r1.rhs, 1.0, 1e-9);
    EXPECT_TRUE(r1.ok);
}

TEST(Holder, RandomPairs) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> w(0.05, 1.0);
    for (const auto& f : catalogue()) {
        for (int trial = 0; trial < 250; ++trial) {
            std::vector<double> u(12), v(12), weights(12);
            for (std::size_t i = 0; i < 12; ++i) {
                u[i] = n(rng);
                v[i] = n(rng);
                weights[i] = w(rng);
            }
            EXPECT_TRUE(holder_pairing_check(f, u, v, DiscreteMeasure(weights, MeasureTag::Lebesgue1D)).ok)
                << f.label();
        }
    }
}

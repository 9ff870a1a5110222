#include "ospectra/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "ospectra/errors.hpp"
#include "ospectra/orlicz.hpp"

namespace ospectra {

using Eigen::MatrixXd;
using Eigen::VectorXd;

OracleSpectrum dense_oracle_p2(const AssembledProblem& prob, int count) {
    const auto p = prob.young().exponent();
    if (prob.young().kind() != YoungKind::Power || !p || *p != 2.0)
        throw InputError("dense oracle requires the Power(2) Young function");
    if (!prob.growth().is_linear()) throw InputError("dense oracle requires g(t) = t");
    const int k = prob.dim();
    if (count < 1 || count > k) throw InputError("oracle eigenpair count must lie in [1, k]");

    const Basis& basis = prob.basis();
    const double s = basis.mesh().s();
    MatrixXd A = MatrixXd::Zero(k, k);
    VectorXd d(k);
    for (const PairNode& node : prob.quadrature().canonical()) {
        const double inv = std::pow(std::abs(node.x - node.y), -s);
        for (int j = 0; j < k; ++j) d[j] = (basis.value(j, node.x) - basis.value(j, node.y)) * inv;
        A.noalias() += (2.0 * node.weight) * d * d.transpose();
    }
    const double h = basis.mesh().h();
    MatrixXd B = MatrixXd::Zero(k, k);
    for (int j = 0; j < k; ++j) {
        B(j, j) = 2.0 * h / 3.0;
        if (j + 1 < k) B(j, j + 1) = B(j + 1, j) = h / 6.0;
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(A, B);
    if (es.info() != Eigen::Success) throw InputError("dense generalized eigensolver failed");

    OracleSpectrum out;
    out.eigenvalues = es.eigenvalues().head(count);
    out.eigenvectors = es.eigenvectors().leftCols(count);
    for (int j = 0; j < count; ++j) {
        const VectorXd v = out.eigenvectors.col(j);
        const VectorXd Av = A * v;
        const double r = (Av - out.eigenvalues[j] * (B * v)).norm() / Av.norm();
        out.max_residual = std::max(out.max_residual, r);
    }
    const MatrixXd G = out.eigenvectors.transpose() * B * out.eigenvectors - MatrixXd::Identity(count, count);
    out.orthonormality_error = G.cwiseAbs().maxCoeff();
    out.stiffness = std::move(A);
    out.mass = std::move(B);
    return out;
}

namespace {

void check_shift(const Basis& basis, const VectorXd& u, double h) {
    if (!std::isfinite(h) || std::abs(h) >= 0.5) throw InputError("translation requires |h| < 1/2");
    if (u.size() != basis.size()) throw InputError("coefficient vector does not match the basis");
}

// x -> u(x + h) - u(x) on a uniform grid 16 times finer than the mesh, 4 Gauss points per cell.
struct Translated {
    std::vector<double> values;
    std::vector<double> weights;
};

Translated translated_difference(const Basis& basis, const VectorXd& u, double h) {
    const Mesh& mesh = basis.mesh();
    const double lo = std::min(mesh.a(), mesh.a() - h);
    const double hi = std::max(mesh.b(), mesh.b() - h);
    const double cell = mesh.h() / 16.0;
    const int cells = static_cast<int>(std::ceil((hi - lo) / cell));
    const double width = (hi - lo) / cells;
    const auto& g = gauss_legendre(4);
    Translated t;
    t.values.reserve(4 * cells);
    t.weights.reserve(4 * cells);
    for (int c = 0; c < cells; ++c) {
        const double mid = lo + (c + 0.5) * width;
        for (std::size_t q = 0; q < g.x.size(); ++q) {
            const double x = mid + 0.5 * width * g.x[q];
            t.values.push_back(basis.evaluate(u, x + h) - basis.evaluate(u, x));
            t.weights.push_back(0.5 * width * g.w[q]);
        }
    }
    return t;
}

struct PairSample {
    std::vector<double> values;
    std::vector<double> weights;
};

PairSample pair_sample(const Basis& basis, const PairQuadrature& quad, const VectorXd& u) {
    PairSample p;
    p.values.reserve(quad.canonical_count());
    p.weights.reserve(quad.canonical_count());
    for (const PairNode& node : quad.canonical()) {
        p.values.push_back(holder_quotient(u, basis, node.x, node.y));
        p.weights.push_back(2.0 * node.weight);
    }
    return p;
}

bool within(double lhs, double rhs) { return lhs <= rhs * (1.0 + 1e-3); }

} // namespace

TranslationReport translation_test(const Basis& basis, const YoungFunction& f, const VectorXd& u, double h) {
    check_shift(basis, u, h);
    return translation_test(basis, build_pair_quadrature(basis, {}), f, u, h);
}

TranslationReport translation_test(const Basis& basis, const PairQuadrature& quad, const YoungFunction& f,
                                   const VectorXd& u, double h) {
    check_shift(basis, u, h);
    TranslationReport r;
    if (u.isZero(0.0)) return r;
    const Translated t = translated_difference(basis, u, h);
    r.lhs = luxemburg_norm(f, t.values, DiscreteMeasure(t.weights, MeasureTag::Lebesgue1D));
    const PairSample p = pair_sample(basis, quad, u);
    const double seminorm = luxemburg_norm(f, p.values, DiscreteMeasure(p.weights, MeasureTag::PairNu));
    const double s = basis.mesh().s();
    const double A = std::max(1.0, kTranslationMeasureConstant);
    r.rhs = std::pow(2.0, s + 1.0) * A * std::pow(std::abs(h), s) * seminorm;
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
    r.ok = within(r.lhs, r.rhs);
    return r;
}

LemmaReport lemma_b1_test(const Basis& basis, const YoungFunction& f, const VectorXd& u, double h) {
    check_shift(basis, u, h);
    return lemma_b1_test(basis, build_pair_quadrature(basis, {}), f, u, h);
}

LemmaReport lemma_b1_test(const Basis& basis, const PairQuadrature& quad, const YoungFunction& f,
                          const VectorXd& u, double h) {
    check_shift(basis, u, h);
    LemmaReport r;
    if (u.isZero(0.0)) return r;
    const Translated t = translated_difference(basis, u, h);
    for (std::size_t i = 0; i < t.values.size(); ++i) r.lhs += t.weights[i] * f.M(std::abs(t.values[i]));
    const double scale = std::pow(2.0, basis.mesh().s() + 1.0) * std::pow(std::abs(h), basis.mesh().s());
    const PairSample p = pair_sample(basis, quad, u);
    double pair = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) pair += p.weights[i] * f.M(std::abs(scale * p.values[i]));
    r.rhs = kTranslationMeasureConstant * pair;
    r.ok = within(r.lhs, r.rhs);
    return r;
}

int BatteryReport::failures() const {
    int n = 0;
    for (const auto& t : tests) n += t.failures;
    return n;
}

namespace {

class Tally {
public:
    explicit Tally(std::string name) { t_.name = std::move(name); }
    // margin >= 0 passes.
    void record(double margin) {
        ++t_.trials;
        if (!(margin >= 0.0)) ++t_.failures;
        if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
        t_.worst_margin = t_.trials == 1 ? margin : std::min(t_.worst_margin, margin);
    }
    SubTest done() const { return t_; }

private:
    SubTest t_;
};

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    return std::exp(d(rng));
}

VectorXd random_state(std::mt19937_64& rng, int k) {
    std::normal_distribution<double> n(0.0, 1.0);
    VectorXd u(k);
    for (int j = 0; j < k; ++j) u[j] = n(rng);
    return u * log_uniform(rng, 1e-2, 3.0) / u.cwiseAbs().maxCoeff();
}

} // namespace

BatteryReport property_battery(const AssembledProblem& prob, int trials, std::uint64_t seed) {
    if (trials < 0) throw InputError("battery trial count must be nonnegative");
    BatteryReport report;
    report.trials = trials;
    report.seed = seed;
    if (trials == 0) return report;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const YoungFunction& f = prob.young();
    const int k = prob.dim();

    Tally gap("young_gap"), equality("young_equality"), density("density_monotone"),
        mono("monotonicity_gap"), homog("luxemburg_homogeneity"), triangle("luxemburg_triangle"),
        ball("luxemburg_unit_ball"), holder("holder_pairing"), grad_m("gradient_Ms"), grad_g("gradient_G"),
        growth("growth_condition");

    const auto& gc = prob.growth().constants();
    for (int trial = 0; trial < trials; ++trial) {
        const double t = log_uniform(rng, 1e-3, 8.0);
        const double tau = log_uniform(rng, 1e-3, 8.0);
        try {
            gap.record(young_gap(f, t, tau) + 1e-10 * (1.0 + t * tau));
            const double mt = f.m(t);
            equality.record(1e-6 * (1.0 + t * mt) - std::abs(young_gap(f, t, mt)));
        } catch (const std::exception&) {
            gap.record(-1.0);
            equality.record(-1.0);
        }

        const double x = log_uniform(rng, 1e-3, 8.0), y = log_uniform(rng, 1e-3, 8.0);
        density.record((f.m(x) - f.m(y)) * (x - y));

        const VectorXd u = random_state(rng, k), v = random_state(rng, k);
        const double mg = monotonicity_gap(prob, u, v);
        mono.record(mg + 1e-10 * (1.0 + std::abs(mg)));

        const int atoms = 8 + static_cast<int>(unit(rng) * 56);
        std::vector<double> w(atoms), a(atoms), b(atoms), sum(atoms), scaled(atoms);
        for (int i = 0; i < atoms; ++i) {
            w[i] = 0.05 + unit(rng);
            a[i] = normal(rng);
            b[i] = normal(rng);
            sum[i] = a[i] + b[i];
        }
        const DiscreteMeasure mu(w, MeasureTag::Lebesgue1D);
        const double alpha = (unit(rng) < 0.5 ? -1.0 : 1.0) * log_uniform(rng, 1e-2, 1e2);
        for (int i = 0; i < atoms; ++i) scaled[i] = alpha * a[i];
        const double na = luxemburg_norm(f, a, mu), nb = luxemburg_norm(f, b, mu);
        const double nab = luxemburg_norm(f, sum, mu), nscaled = luxemburg_norm(f, scaled, mu);
        homog.record(1e-9 * std::abs(alpha) * na - std::abs(nscaled - std::abs(alpha) * na));
        triangle.record((na + nb) * (1.0 + 1e-9) - nab);
        for (int i = 0; i < atoms; ++i) scaled[i] = a[i] / na;
        const double unit_mod = modular(f, scaled, mu);
        ball.record(1e-6 - std::abs(unit_mod - 1.0));

        try {
            const HolderReport hr = holder_pairing_check(f, a, b, mu);
            holder.record(hr.rhs + 1e-8 - hr.lhs);
        } catch (const std::exception&) {
            holder.record(-1.0);
        }

        // Directional central differences.
        VectorXd dir(k);
        for (int j = 0; j < k; ++j) dir[j] = normal(rng);
        dir /= dir.norm();
        const double eps = 1e-6 * (1.0 + u.norm());
        const Gradients gr = evaluate_all(prob, u);
        const double fd_m = (modular_Ms(prob, u + eps * dir) - modular_Ms(prob, u - eps * dir)) / (2.0 * eps);
        const double fd_g = (potential_G(prob, u + eps * dir) - potential_G(prob, u - eps * dir)) / (2.0 * eps);
        grad_m.record(1e-5 * (std::abs(gr.gM.dot(dir)) + gr.gM.norm()) - std::abs(fd_m - gr.gM.dot(dir)));
        grad_g.record(1e-5 * (std::abs(gr.gG.dot(dir)) + gr.gG.norm()) - std::abs(fd_g - gr.gG.dot(dir)));

        const double z = log_uniform(rng, 1e-3, 1e2);
        const double gz = prob.growth().g(z), gmz = prob.growth().g(-z);
        const double bound = gc.a1 + gc.a2 * f.m(gc.a3 * z) - std::abs(gz);
        const double odd = 1e-12 * (1.0 + std::abs(gz)) - std::abs(gz + gmz);
        growth.record(std::min({bound + 1e-12 * (1.0 + std::abs(gz)), odd, gz}));
    }

    for (const Tally* t : {&gap, &equality, &density, &mono, &homog, &triangle, &ball, &holder, &grad_m, &grad_g,
                           &growth})
        report.tests.push_back(t->done());
    return report;
}

} // namespace ospectra

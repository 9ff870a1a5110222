#include "ospectra/operator.hpp"

#include <algorithm>
#include <cmath>

#include "ospectra/errors.hpp"

namespace ospectra {

namespace {

void require_size(const AssembledProblem& prob, const Eigen::VectorXd& u) {
    if (u.size() != prob.dim()) throw InputError("coefficient vector does not match the basis");
}

// Nodal values at the two ends of element e; boundary nodes are zero.
std::pair<double, double> element_values(const Eigen::VectorXd& u, int e, int k) {
    return {e == 0 ? 0.0 : u[e - 1], e == k ? 0.0 : u[e]};
}

// Calls f(x_local in [0, 1], weight) over Gauss points of element e, split at a sign change of u.
// Pieces ending at a zero of u use t = t0 + L sigma^2, which turns |t - t0|^{p-1} into a polynomial.
// With kinks in g the element is also cut where |u| crosses one, so every piece is smooth.
template <class F>
void element_quadrature(double ul, double ur, int order, const std::vector<double>& kinks, F&& f) {
    const auto& g = gauss_legendre(order);
    auto run = [&](double lo, double hi, bool zero_lo, bool zero_hi) {
        const double len = hi - lo;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double sg = 0.5 * (g.x[i] + 1.0), w = 0.5 * g.w[i];
            if (zero_lo && !zero_hi)
                f(lo + len * sg * sg, 2.0 * len * sg * w);
            else if (zero_hi && !zero_lo)
                f(hi - len * sg * sg, 2.0 * len * sg * w);
            else
                f(lo + len * sg, len * w);
        }
    };
    const double t0 = ul != ur ? ul / (ul - ur) : 0.0;
    if (!kinks.empty() && ul != ur) {
        std::vector<double> cuts{0.0, 1.0};
        for (double k : kinks)
            for (double level : {k, -k}) {
                const double t = (level - ul) / (ur - ul);
                if (t > 0.0 && t < 1.0) cuts.push_back(t);
            }
        if (ul * ur < 0.0) cuts.push_back(t0);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
            if (cuts[j + 1] > cuts[j])
                run(cuts[j], cuts[j + 1], cuts[j] == t0 || (j == 0 && ul == 0.0),
                    cuts[j + 1] == t0 || (j + 2 == cuts.size() && ur == 0.0));
        return;
    }
    if (ul * ur < 0.0) {
        run(0.0, t0, false, true);
        run(t0, 1.0, true, false);
        return;
    }
    // A zero just outside the element still spoils plain Gauss; map from it instead.
    if (ul != 0.0 && ur != 0.0 && ul != ur && t0 > -2.0 && t0 < 3.0) {
        const double dir = t0 < 0.0 ? 1.0 : -1.0;
        const double sa = std::sqrt(std::abs(t0)), sb = std::sqrt(std::abs(1.0 - t0));
        const double lo = std::min(sa, sb), len = std::abs(sb - sa);
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double sg = lo + len * 0.5 * (g.x[i] + 1.0);
            f(t0 + dir * sg * sg, 2.0 * sg * len * 0.5 * g.w[i]);
        }
        return;
    }
    run(0.0, 1.0, ul == 0.0, ur == 0.0);
}

int g_order(const AssembledProblem& prob) { return std::max(4, prob.quadrature().options().order); }

} // namespace

AssembledProblem::AssembledProblem(Basis basis, PairQuadrature quad, YoungFunction young, GrowthFunction growth) {
    auto d = std::make_shared<Data>(Data{std::move(basis), std::move(quad), std::move(young), std::move(growth),
                                         {}, {}, {}, {}, {}, {}});
    const Mesh& mesh = d->basis.mesh();
    const int k = mesh.k();
    const double s = mesh.s();
    const auto canon = d->quad.canonical();
    const std::size_t n = canon.size();
    d->weights.resize(n);
    d->idx.assign(4 * n, 0);
    d->val.assign(4 * n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const PairNode& p = canon[i];
        if (!(p.weight > 0.0) || p.x == p.y) throw InputError("invalid pair quadrature node");
        d->weights[i] = 2.0 * p.weight;
        const double inv = std::pow(std::abs(p.x - p.y), -s);
        int used = 0;
        auto add = [&](int j, double v) {
            if (j < 0 || j >= k || v == 0.0) return;
            for (int l = 0; l < used; ++l)
                if (d->idx[4 * i + l] == j) {
                    d->val[4 * i + l] += v;
                    return;
                }
            d->idx[4 * i + used] = j;
            d->val[4 * i + used] = v;
            ++used;
        };
        auto hats = [&](double x, int e, double sign) {
            if (e < 0) return;
            const double t = (x - mesh.point(e)) / mesh.h();
            add(e - 1, sign * (1.0 - t) * inv);
            add(e, sign * t * inv);
        };
        hats(p.x, p.cell_x, 1.0);
        hats(p.y, p.cell_y, -1.0);
        for (int l = 0; l < 4; ++l)
            if (!std::isfinite(d->val[4 * i + l])) throw InputError("non-finite cached Hoelder quotient");
    }

    d->stiffness = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = d->weights[i];
        for (int l = 0; l < 4; ++l) {
            const double vl = d->val[4 * i + l];
            if (vl == 0.0) continue;
            for (int m = 0; m < 4; ++m)
                d->stiffness(d->idx[4 * i + l], d->idx[4 * i + m]) += w * vl * d->val[4 * i + m];
        }
    }
    d->stiffness = 0.5 * (d->stiffness + d->stiffness.transpose()).eval();

    const double h = mesh.h();
    d->mass = Eigen::MatrixXd::Zero(k, k);
    for (int j = 0; j < k; ++j) {
        d->mass(j, j) = 2.0 * h / 3.0;
        if (j + 1 < k) d->mass(j, j + 1) = d->mass(j + 1, j) = h / 6.0;
    }
    d->factor.compute(d->stiffness);
    if (d->factor.info() != Eigen::Success) throw InputError("assembled stiffness is not positive definite");
    d_ = std::move(d);
}

AssembledProblem AssembledProblem::build(double a, double b, int k, double s, YoungFunction young,
                                         GrowthFunction growth, const PairQuadratureOptions& opts) {
    Basis basis = build_mesh(a, b, k, s);
    PairQuadrature quad = build_pair_quadrature(basis, opts);
    return AssembledProblem(std::move(basis), std::move(quad), std::move(young), std::move(growth));
}

void AssembledProblem::holder_values(const Eigen::VectorXd& u, std::vector<double>& out) const {
    const std::size_t n = d_->weights.size();
    out.resize(n);
    const int* idx = d_->idx.data();
    const double* val = d_->val.data();
    const double* c = u.data();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t o = 4 * i;
        out[i] = val[o] * c[idx[o]] + val[o + 1] * c[idx[o + 1]] + val[o + 2] * c[idx[o + 2]] +
                 val[o + 3] * c[idx[o + 3]];
    }
}

Eigen::VectorXd AssembledProblem::scatter(const std::vector<double>& v) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
    const std::size_t n = d_->weights.size();
    const int* idx = d_->idx.data();
    const double* val = d_->val.data();
    const double* w = d_->weights.data();
    double* out = g.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = w[i] * v[i];
        const std::size_t o = 4 * i;
        out[idx[o]] += t * val[o];
        out[idx[o + 1]] += t * val[o + 1];
        out[idx[o + 2]] += t * val[o + 2];
        out[idx[o + 3]] += t * val[o + 3];
    }
    return g;
}

double modular_Ms(const AssembledProblem& prob, const Eigen::VectorXd& u) {
    require_size(prob, u);
    std::vector<double> D;
    prob.holder_values(u, D);
    prob.young().M_many(D, D);
    const auto& w = prob.folded_weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < D.size(); ++i) sum += w[i] * D[i];
    return sum;
}

Eigen::VectorXd grad_Ms(const AssembledProblem& prob, const Eigen::VectorXd& u) {
    require_size(prob, u);
    std::vector<double> D;
    prob.holder_values(u, D);
    prob.young().m_signed_many(D, D);
    return prob.scatter(D);
}

double potential_G(const AssembledProblem& prob, const Eigen::VectorXd& u) {
    require_size(prob, u);
    const Mesh& mesh = prob.basis().mesh();
    const int k = mesh.k();
    const double h = mesh.h();
    const auto& g = prob.growth();
    const auto kinks = g.kinks();
    double sum = 0.0;
    for (int e = 0; e <= k; ++e) {
        const auto [ul, ur] = element_values(u, e, k);
        if (ul == 0.0 && ur == 0.0) continue;
        element_quadrature(ul, ur, g_order(prob), kinks, [&](double t, double w) {
            sum += h * w * g.G((1.0 - t) * ul + t * ur);
        });
    }
    return sum;
}

Eigen::VectorXd grad_G(const AssembledProblem& prob, const Eigen::VectorXd& u) {
    require_size(prob, u);
    const Mesh& mesh = prob.basis().mesh();
    const int k = mesh.k();
    const double h = mesh.h();
    const auto& g = prob.growth();
    const auto kinks = g.kinks();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
    for (int e = 0; e <= k; ++e) {
        const auto [ul, ur] = element_values(u, e, k);
        if (ul == 0.0 && ur == 0.0) continue;
        double left = 0.0, right = 0.0;
        element_quadrature(ul, ur, g_order(prob), kinks, [&](double t, double w) {
            const double gv = h * w * g.g((1.0 - t) * ul + t * ur);
            left += gv * (1.0 - t);
            right += gv * t;
        });
        if (e > 0) out[e - 1] += left;
        if (e < k) out[e] += right;
    }
    return out;
}

Gradients evaluate_all(const AssembledProblem& prob, const Eigen::VectorXd& u) {
    require_size(prob, u);
    Gradients r;
    std::vector<double> D, tmp;
    prob.holder_values(u, D);
    tmp.resize(D.size());
    prob.young().M_many(D, tmp);
    const auto& w = prob.folded_weights();
    for (std::size_t i = 0; i < D.size(); ++i) r.modular += w[i] * tmp[i];
    prob.young().m_signed_many(D, D);
    r.gM = prob.scatter(D);
    r.potential = potential_G(prob, u);
    r.gG = grad_G(prob, u);
    return r;
}

double weak_residual(const Eigen::VectorXd& gM, const Eigen::VectorXd& gG, double lambda) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < gM.size(); ++j)
        worst = std::max(worst, std::abs(gM[j] - lambda * gG[j]) / (1.0 + std::abs(gM[j])));
    return worst;
}

double weak_residual(const AssembledProblem& prob, double lambda, const Eigen::VectorXd& u) {
    return weak_residual(grad_Ms(prob, u), grad_G(prob, u), lambda);
}

double monotonicity_gap(const AssembledProblem& prob, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    require_size(prob, u);
    require_size(prob, v);
    return (grad_Ms(prob, u) - grad_Ms(prob, v)).dot(u - v);
}

} // namespace ospectra

#include "ospectra/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/math/special_functions/erf.hpp>

#include "ospectra/errors.hpp"

namespace ospectra {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SolverConfig::validate() const {
    if (!(kkt_tol > 0.0)) throw InputError("solver.kkt_tol must be positive");
    if (max_iter < 1) throw InputError("solver.max_iter must be >= 1");
    if (restarts < 1) throw InputError("solver.restarts must be >= 1");
    if (sphere_samples < 0) throw InputError("solver.sphere_samples must be >= 0");
    if (!(armijo > 0.0 && armijo < 1.0)) throw InputError("solver.armijo must lie in (0, 1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw InputError("solver.backtrack must lie in (0, 1)");
    if (max_backtracks < 1) throw InputError("solver.max_backtracks must be >= 1");
    if (!(switch_tol > 0.0)) throw InputError("solver.switch_tol must be positive");
    if (newton_max < 1) throw InputError("solver.newton_max must be >= 1");
    if (warmup_iter < 0) throw InputError("solver.warmup_iter must be >= 0");
    if (max_outer < 0) throw InputError("solver.max_outer must be >= 0");
}

Eigen::VectorXd sign_normalized(const Eigen::VectorXd& u) {
    const double s = u.sum();
    if (s < 0.0) return -u;
    if (s == 0.0) {
        for (Eigen::Index j = 0; j < u.size(); ++j)
            if (u[j] != 0.0) return u[j] < 0.0 ? VectorXd(-u) : u;
    }
    return u;
}

namespace {

constexpr double kModTol = 1e-8;

struct Workspace {
    std::vector<double> D, tmp;
};

double scaled_sum(const AssembledProblem& prob, const Workspace& ws, std::vector<double>& tmp, double sigma,
                  bool derivative) {
    const auto& D = ws.D;
    const auto& w = prob.folded_weights();
    tmp.resize(D.size());
    for (std::size_t i = 0; i < D.size(); ++i) tmp[i] = sigma * D[i];
    double sum = 0.0;
    if (derivative) {
        prob.young().m_signed_many(tmp, tmp);
        for (std::size_t i = 0; i < D.size(); ++i) sum += w[i] * tmp[i] * D[i];
    } else {
        prob.young().M_many(tmp, tmp);
        for (std::size_t i = 0; i < D.size(); ++i) sum += w[i] * tmp[i];
    }
    return sum;
}

// sigma > 0 with M_s(sigma u) = 1. Closed form for power modulars, safeguarded Newton otherwise.
double manifold_scale(const AssembledProblem& prob, const VectorXd& u, Workspace& ws) {
    prob.holder_values(u, ws.D);
    const double m1 = scaled_sum(prob, ws, ws.tmp, 1.0, false);
    if (!(m1 > 0.0)) throw InputError("cannot normalize the zero function onto the constraint manifold");
    const auto& f = prob.young();
    if (f.kind() == YoungKind::Power && std::isfinite(m1)) return std::pow(m1, -1.0 / *f.exponent());

    auto mod = [&](double s) { return scaled_sum(prob, ws, ws.tmp, s, false); };
    double lo = 1.0, hi = 1.0;
    if (m1 > 1.0) {
        do {
            hi = lo;
            lo *= 0.5;
        } while (mod(lo) > 1.0);
    } else {
        do {
            lo = hi;
            hi *= 2.0;
        } while (mod(hi) < 1.0);
    }
    double sigma = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        const double val = mod(sigma) - 1.0;
        if (std::abs(val) <= 1e-14) break;
        if (val > 0.0)
            hi = sigma;
        else
            lo = sigma;
        if (hi - lo <= 1e-16 * hi) break;
        const double der = scaled_sum(prob, ws, ws.tmp, sigma, true);
        double next = sigma - val / der;
        if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
        sigma = next;
    }
    return sigma;
}

struct JEval {
    double value = 0.0;
    double lambda = 0.0;
    VectorXd w;
    VectorXd grad;
};

// J(u) = G(u / N(u)) where N normalizes onto the manifold; J is even and 0-homogeneous.
JEval eval_J(const AssembledProblem& prob, const VectorXd& u, Workspace& ws, bool with_grad) {
    JEval r;
    const double sigma = manifold_scale(prob, u, ws);
    r.w = sigma * u;
    if (!with_grad) {
        r.value = potential_G(prob, r.w);
        return r;
    }
    const Gradients ev = evaluate_all(prob, r.w);
    r.value = ev.potential;
    const double mw = ev.gM.dot(r.w), gw = ev.gG.dot(r.w);
    r.lambda = mw / gw;
    r.grad = sigma * (ev.gG - (gw / mw) * ev.gM);
    return r;
}

double quotient(const Gradients& ev, const VectorXd& u) { return ev.gM.dot(u) / ev.gG.dot(u); }

double merit(const Gradients& ev, double lambda) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < ev.gM.size(); ++j) {
        const double r = (ev.gM[j] - lambda * ev.gG[j]) / (1.0 + std::abs(ev.gM[j]));
        s += r * r;
    }
    const double c = ev.modular - 1.0;
    return std::sqrt(s + c * c);
}

VectorXd precondition(const AssembledProblem& prob, const VectorXd& v) { return prob.stiffness_factor().solve(v); }

// Tangent ascent direction for G on the manifold in the stiffness metric.
VectorXd ascent_direction(const AssembledProblem& prob, const Gradients& ev) {
    const VectorXd pg = precondition(prob, ev.gG);
    const VectorXd pm = precondition(prob, ev.gM);
    const double alpha = ev.gM.dot(pg) / ev.gM.dot(pm);
    return pg - alpha * pm;
}

MatrixXd a_orthonormalize(const AssembledProblem& prob, const MatrixXd& F) {
    const MatrixXd G = F.transpose() * prob.linear_stiffness() * F;
    Eigen::LLT<MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw ConvergenceError("degenerate subspace frame", F.col(0), 0.0, 0.0, 0);
    return llt.matrixL().solve(F.transpose()).transpose();
}

// Leading eigenvectors of the quadratic surrogate, A v = mu B v, as an A-orthonormal frame.
MatrixXd surrogate_frame(const AssembledProblem& prob, int i) {
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(prob.linear_stiffness(), prob.mass_matrix());
    if (es.info() != Eigen::Success) throw ConvergenceError("surrogate eigensolve failed", VectorXd(), 0, 0, 0);
    MatrixXd F = es.eigenvectors().leftCols(i);
    for (int c = 0; c < i; ++c) F.col(c) = sign_normalized(F.col(c));
    return a_orthonormalize(prob, F);
}

// Jacobian of (grad M_s - lambda grad G, M_s - 1). The M_s block is assembled node by node from
// finite-difference slopes of m; where m is concave near a vanishing quotient the secant slope
// m(D)/D is used instead, since the residual is only Hoelder continuous there.
MatrixXd bordered_jacobian(const AssembledProblem& prob, const VectorXd& u, double lambda, const Gradients& ev) {
    const int k = prob.dim();
    std::vector<double> D, plus, minus, at;
    prob.holder_values(u, D);
    const std::size_t n = D.size();
    double dmax = 0.0;
    for (double d : D) dmax = std::max(dmax, std::abs(d));
    plus.resize(n);
    minus.resize(n);
    at.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double eta = 1e-6 * (1.0 + std::abs(D[i]));
        plus[i] = D[i] + eta;
        minus[i] = D[i] - eta;
        at[i] = std::abs(D[i]) < 1e-14 * dmax ? 1e-14 * dmax : D[i];
    }
    const auto& f = prob.young();
    f.m_signed_many(plus, plus);
    f.m_signed_many(minus, minus);
    std::vector<double> mat(at);
    f.m_signed_many(mat, mat);
    const double theta = 1e-3 * dmax;

    MatrixXd J = MatrixXd::Zero(k + 1, k + 1);
    const auto& w = prob.folded_weights();
    const auto& idx = prob.stencil_idx();
    const auto& val = prob.stencil_val();
    for (std::size_t i = 0; i < n; ++i) {
        const double eta = 1e-6 * (1.0 + std::abs(D[i]));
        double slope = (plus[i] - minus[i]) / (2.0 * eta);
        if (std::abs(D[i]) < theta && at[i] != 0.0) {
            const double secant = mat[i] / at[i];
            if (secant > slope) slope = secant;
        }
        const double ws = w[i] * slope;
        if (ws == 0.0) continue;
        for (int l = 0; l < 4; ++l) {
            const double vl = ws * val[4 * i + l];
            if (vl == 0.0) continue;
            for (int m = 0; m < 4; ++m) J(idx[4 * i + l], idx[4 * i + m]) += vl * val[4 * i + m];
        }
    }
    for (int j = 0; j < k; ++j) {
        const double hj = 1e-6 * (1.0 + std::abs(u[j]));
        VectorXd up = u;
        up[j] += hj;
        J.col(j).head(k) -= lambda * (grad_G(prob, up) - ev.gG) / hj;
        J(k, j) = ev.gM[j];
    }
    J.col(k).head(k) = -ev.gG;
    return J;
}

struct AscentResult {
    VectorXd u;
    int iterations = 0;
};

AscentResult ascend(const AssembledProblem& prob, const VectorXd& u0, const SolverConfig& cfg, Workspace& ws) {
    AscentResult r;
    VectorXd u = manifold_scale(prob, u0, ws) * u0;
    Gradients ev = evaluate_all(prob, u);
    double lambda = quotient(ev, u);
    double scale = 1.0;
    for (; r.iterations < cfg.max_iter; ++r.iterations) {
        if (weak_residual(ev.gM, ev.gG, lambda) <= cfg.switch_tol) break;
        const VectorXd d = ascent_direction(prob, ev);
        const double slope = ev.gG.dot(d);
        if (!(slope > 0.0)) break;
        double eta = scale * std::abs(lambda);
        bool accepted = false;
        int bt = 0;
        VectorXd trial;
        for (; bt < cfg.max_backtracks; ++bt) {
            const VectorXd step = u + eta * d;
            trial = manifold_scale(prob, step, ws) * step;
            if (potential_G(prob, trial) >= ev.potential + cfg.armijo * eta * slope) {
                accepted = true;
                break;
            }
            eta *= cfg.backtrack;
        }
        if (!accepted) break;
        scale = bt == 0 ? std::min(4.0, 1.25 * scale) : eta / std::abs(lambda);
        u = trial;
        ev = evaluate_all(prob, u);
        lambda = quotient(ev, u);
    }
    r.u = u;
    return r;
}

bool better(const Eigenpair& a, const Eigenpair& b) {
    const double tie = 1e-10 * std::max(1.0, std::max(std::abs(a.c_value), std::abs(b.c_value)));
    if (std::abs(a.c_value - b.c_value) > tie) return a.c_value > b.c_value;
    if (std::abs(a.lambda - b.lambda) > 1e-10 * std::max(1.0, std::abs(b.lambda))) return a.lambda < b.lambda;
    return std::lexicographical_compare(a.u.data(), a.u.data() + a.u.size(), b.u.data(), b.u.data() + b.u.size());
}

VectorXd random_vector(int k, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    VectorXd v(k);
    for (int j = 0; j < k; ++j) v[j] = nd(rng);
    return v;
}

// Quasi-uniform directions on the half sphere a_0 >= 0 of R^i; antipodes are implied since J is even.
std::vector<VectorXd> hemisphere(int i, int n) {
    std::vector<VectorXd> out;
    out.reserve(n);
    if (i == 1) {
        out.push_back(VectorXd::Ones(1));
        return out;
    }
    if (i == 2) {
        for (int j = 0; j < n; ++j) {
            const double th = (j + 0.5) * M_PI / n - 0.5 * M_PI;
            VectorXd a(2);
            a << std::cos(th), std::sin(th);
            out.push_back(a);
        }
        return out;
    }
    static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    std::mt19937_64 rng(0x5eedULL + i);
    for (int j = 1; j <= n; ++j) {
        VectorXd a(i);
        for (int d = 0; d < i; ++d) {
            double x;
            if (d < 16) {
                double f = 1.0, r = 0.0;
                for (int idx = j; idx > 0; idx /= primes[d]) {
                    f /= primes[d];
                    r += f * (idx % primes[d]);
                }
                x = std::sqrt(2.0) * boost::math::erf_inv(2.0 * r - 1.0);
            } else {
                x = std::normal_distribution<double>(0.0, 1.0)(rng);
            }
            a[d] = x;
        }
        if (a[0] < 0.0) a = -a;
        const double nrm = a.norm();
        if (nrm > 0.0) out.push_back(a / nrm);
    }
    return out;
}

struct Inner {
    double value = std::numeric_limits<double>::infinity();
    VectorXd a;
};

class LevelSearch {
public:
    LevelSearch(const AssembledProblem& prob, int i, const SolverConfig& cfg) : prob_(prob), i_(i), cfg_(cfg) {
        full_ = std::max(1, (cfg.sphere_samples > 0 ? cfg.sphere_samples : 64 * i) / 2);
        reduced_ = std::max(1, std::min(full_, 8 * i));
    }

    double phi(const MatrixXd& F, const VectorXd& a) { return eval_J(prob_, F * a, ws_, false).value; }

    Inner descend(const MatrixXd& F, VectorXd a) {
        a.normalize();
        JEval je = eval_J(prob_, F * a, ws_, true);
        double eta = 0.5 / std::max(je.value, 1e-300);
        for (int it = 0; it < 200; ++it) {
            VectorXd g = F.transpose() * je.grad;
            g -= g.dot(a) * a;
            const double gn2 = g.squaredNorm();
            if (std::sqrt(gn2) <= 1e-7 * std::abs(je.value)) break;
            bool accepted = false;
            for (int bt = 0; bt < cfg_.max_backtracks; ++bt) {
                const VectorXd an = (a - eta * g).normalized();
                const double v = phi(F, an);
                if (v <= je.value - cfg_.armijo * eta * gn2) {
                    a = an;
                    accepted = true;
                    break;
                }
                eta *= cfg_.backtrack;
            }
            if (!accepted) break;
            eta *= 2.0;
            je = eval_J(prob_, F * a, ws_, true);
        }
        return {je.value, a};
    }

    Inner inner_inf(const MatrixXd& F, int samples, const std::vector<VectorXd>& warm) {
        Inner best_sample;
        for (const auto& a : hemisphere(i_, samples)) {
            const double v = phi(F, a);
            if (v < best_sample.value) best_sample = {v, a};
        }
        Inner out = descend(F, best_sample.a);
        for (const auto& a : warm) {
            Inner r = descend(F, a);
            if (r.value < out.value) out = r;
        }
        return out;
    }

    void warm_up(MatrixXd& F) {
        for (int it = 0; it < cfg_.warmup_iter; ++it) {
            for (int c = 0; c < i_; ++c) {
                const JEval je = eval_J(prob_, F.col(c), ws_, true);
                F.col(c) += (0.5 / je.value) * precondition(prob_, je.grad);
            }
            F = a_orthonormalize(prob_, F);
        }
    }

    // Danskin-type ascent on W -> c(W) by moving the subspace along the worst direction.
    int ascend(MatrixXd& F, Inner& cur) {
        int accepted_steps = 0;
        double eta = 0.5 / cur.value;
        for (int outer = 0; outer < cfg_.max_outer; ++outer) {
            const VectorXd uh = F * cur.a;
            const JEval je = eval_J(prob_, uh, ws_, true);
            const VectorXd d = precondition(prob_, je.grad);
            if (!(d.norm() > 0.0)) break;
            bool accepted = false;
            for (int bt = 0; bt < 12; ++bt) {
                const MatrixXd raw = F + eta * d * cur.a.transpose();
                const MatrixXd G = raw.transpose() * prob_.linear_stiffness() * raw;
                Eigen::LLT<MatrixXd> llt(G);
                if (llt.info() != Eigen::Success) {
                    eta *= 0.5;
                    continue;
                }
                const MatrixXd Q = llt.matrixL().solve(raw.transpose()).transpose();
                const VectorXd carried = (llt.matrixU() * cur.a).normalized();
                Inner next = inner_inf(Q, reduced_, {carried});
                if (next.value > cur.value * (1.0 + 1e-14)) {
                    F = Q;
                    cur = next;
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            if (!accepted) break;
            ++accepted_steps;
            eta *= 2.0;
            if (accepted_steps % 10 == 0) {
                Inner check = inner_inf(F, full_, {cur.a});
                if (check.value < cur.value) cur = check;
            }
        }
        Inner check = inner_inf(F, full_, {cur.a});
        if (check.value < cur.value) cur = check;
        return accepted_steps;
    }

    int full_samples() const { return full_; }

private:
    const AssembledProblem& prob_;
    int i_;
    const SolverConfig& cfg_;
    int full_, reduced_;
    Workspace ws_;
};

} // namespace

Eigen::VectorXd normalize_to_manifold(const AssembledProblem& prob, const Eigen::VectorXd& u) {
    if (u.size() != prob.dim()) throw InputError("coefficient vector does not match the basis");
    if (!u.allFinite()) throw InputError("coefficient vector must be finite");
    Workspace ws;
    return manifold_scale(prob, u, ws) * u;
}

Eigenpair kkt_refine(const AssembledProblem& prob, const Eigen::VectorXd& u0, const SolverConfig& cfg) {
    cfg.validate();
    const int k = prob.dim();
    VectorXd u = normalize_to_manifold(prob, u0);
    Gradients ev = evaluate_all(prob, u);
    double lambda = quotient(ev, u);
    Workspace ws;

    int it = 0;
    for (;;) {
        const double res = weak_residual(ev.gM, ev.gG, lambda);
        if (res <= cfg.kkt_tol && std::abs(ev.modular - 1.0) <= kModTol) {
            // Report the exact manifold point and its Rayleigh-type multiplier.
            const VectorXd uf = manifold_scale(prob, u, ws) * u;
            const Gradients ef = evaluate_all(prob, uf);
            const double lf = quotient(ef, uf);
            const double rf = weak_residual(ef.gM, ef.gG, lf);
            if (rf <= cfg.kkt_tol && std::abs(ef.modular - 1.0) <= kModTol) {
                Eigenpair p;
                p.u = sign_normalized(uf);
                p.lambda = lf;
                p.dim = k;
                p.level = 1;
                p.modular = modular_Ms(prob, p.u);
                p.c_value = potential_G(prob, p.u);
                p.minimax_value = p.c_value;
                p.residual = weak_residual(prob, lf, p.u);
                p.iterations = it;
                p.frame = p.u;
                return p;
            }
            u = uf;
            ev = ef;
            lambda = lf;
        }
        if (it >= cfg.newton_max)
            throw ConvergenceError("KKT refinement did not converge", u, lambda, res, it);
        ++it;

        const MatrixXd J = bordered_jacobian(prob, u, lambda, ev);
        const VectorXd r0 = ev.gM - lambda * ev.gG;
        VectorXd F(k + 1);
        F << r0, ev.modular - 1.0;
        const VectorXd delta = J.fullPivLu().solve(-F);

        const double phi0 = merit(ev, lambda);
        bool accepted = false;
        if (delta.allFinite()) {
            double t = 1.0;
            for (int bt = 0; bt < 20; ++bt, t *= 0.5) {
                const VectorXd un = u + t * delta.head(k);
                const double ln = lambda + t * delta[k];
                const Gradients en = evaluate_all(prob, un);
                if (merit(en, ln) < (1.0 - 1e-4 * t) * phi0) {
                    u = un;
                    lambda = ln;
                    ev = en;
                    accepted = true;
                    break;
                }
            }
        }
        if (accepted) continue;

        // Fallback: fixed-point multiplier and a preconditioned step against the stationarity residual.
        u = manifold_scale(prob, u, ws) * u;
        ev = evaluate_all(prob, u);
        lambda = quotient(ev, u);
        const double base = merit(ev, lambda);
        VectorXd v = precondition(prob, ev.gM - lambda * ev.gG);
        const VectorXd pm = precondition(prob, ev.gM);
        v -= (ev.gM.dot(v) / ev.gM.dot(pm)) * pm;
        double t = 1.0;
        for (int bt = 0; bt < 30; ++bt, t *= 0.5) {
            const VectorXd step = u - t * v;
            const VectorXd un = manifold_scale(prob, step, ws) * step;
            const Gradients en = evaluate_all(prob, un);
            const double ln = quotient(en, un);
            if (merit(en, ln) < base) {
                u = un;
                ev = en;
                lambda = ln;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw ConvergenceError("KKT refinement stalled", u, lambda, weak_residual(ev.gM, ev.gG, lambda), it);
    }
}

Eigenpair solve_first(const AssembledProblem& prob, const SolverConfig& cfg) {
    cfg.validate();
    std::vector<VectorXd> starts;
    starts.push_back(surrogate_frame(prob, 1).col(0));
    std::mt19937_64 rng(cfg.rng_seed);
    for (int r = 1; r < cfg.restarts; ++r) starts.push_back(random_vector(prob.dim(), rng));
    return solve_first(prob, cfg, starts);
}

Eigenpair solve_first(const AssembledProblem& prob, const SolverConfig& cfg, std::span<const VectorXd> starts) {
    cfg.validate();
    if (starts.empty()) throw InputError("solve_first needs at least one start");
    std::optional<Eigenpair> best;
    VectorXd fail_u;
    double fail_res = std::numeric_limits<double>::infinity(), fail_lambda = 0.0;
    int total_iter = 0;
    Workspace ws;
    for (const auto& s : starts) {
        if (s.size() != prob.dim()) throw InputError("start vector does not match the basis");
        if (s.isZero(0.0)) throw InputError("start vector must be nonzero");
        const AscentResult asc = ascend(prob, s, cfg, ws);
        total_iter += asc.iterations;
        try {
            Eigenpair p = kkt_refine(prob, asc.u, cfg);
            p.iterations += asc.iterations;
            if (!best || better(p, *best)) best = std::move(p);
        } catch (const ConvergenceError& e) {
            total_iter += e.iterations();
            if (e.residual() < fail_res) {
                fail_res = e.residual();
                fail_u = e.best_iterate();
                fail_lambda = e.lambda();
            }
        }
    }
    if (!best) throw ConvergenceError("no start converged", fail_u, fail_lambda, fail_res, total_iter);
    best->level = 1;
    best->frame = best->u;
    return *best;
}

Eigenpair solve_level(const AssembledProblem& prob, int i, const SolverConfig& cfg, const Eigen::MatrixXd* warm) {
    cfg.validate();
    const int k = prob.dim();
    if (i < 1) throw InputError("level must be >= 1");
    if (i > k) throw LevelError("level exceeds dimension");
    if (warm && (warm->rows() != k || warm->cols() != i)) throw InputError("warm frame has the wrong shape");
    if (i == 1) {
        if (warm) {
            const VectorXd start = warm->col(0);
            return solve_first(prob, cfg, std::span<const VectorXd>(&start, 1));
        }
        return solve_first(prob, cfg);
    }

    LevelSearch search(prob, i, cfg);
    std::vector<MatrixXd> frames;
    if (warm) {
        frames.push_back(a_orthonormalize(prob, *warm));
    } else {
        frames.push_back(surrogate_frame(prob, i));
        std::mt19937_64 rng(cfg.rng_seed);
        for (int r = 1; r < cfg.restarts; ++r) {
            MatrixXd F(k, i);
            for (int c = 0; c < i; ++c) F.col(c) = random_vector(k, rng);
            F = a_orthonormalize(prob, F);
            search.warm_up(F);
            frames.push_back(std::move(F));
        }
    }

    std::size_t best_idx = 0;
    Inner best;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < frames.size(); ++f) {
        Inner r = search.inner_inf(frames[f], search.full_samples(), {});
        if (r.value > best.value) {
            best = r;
            best_idx = f;
        }
    }
    MatrixXd F = frames[best_idx];
    const int outer = search.ascend(F, best);

    Eigenpair p = kkt_refine(prob, F * best.a, cfg);
    p.level = i;
    p.minimax_value = best.value;
    p.iterations += outer;
    p.frame = F;
    return p;
}

std::vector<ContinuationStep> continuation(std::span<const AssembledProblem> family, int i, const SolverConfig& cfg) {
    cfg.validate();
    for (std::size_t n = 1; n < family.size(); ++n) {
        const Mesh& c = family[n - 1].basis().mesh();
        const Mesh& f = family[n].basis().mesh();
        if (f.k() != 2 * c.k() + 1 || f.a() != c.a() || f.b() != c.b() || f.s() != c.s())
            throw InputError("continuation needs dyadically nested meshes on one domain");
    }
    std::vector<ContinuationStep> out;
    std::optional<MatrixXd> carry;
    for (std::size_t n = 0; n < family.size(); ++n) {
        ContinuationStep step;
        step.k = family[n].dim();
        try {
            Eigenpair p = carry ? solve_level(family[n], i, cfg, &*carry) : solve_level(family[n], i, cfg);
            if (n + 1 < family.size()) carry = family[n].basis().prolongate(p.frame);
            step.pair = std::move(p);
        } catch (const std::exception& e) {
            step.error = e.what();
            carry.reset();
        }
        out.push_back(std::move(step));
    }
    return out;
}

} // namespace ospectra

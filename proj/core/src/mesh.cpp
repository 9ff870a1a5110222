#include "ospectra/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "ospectra/errors.hpp"

namespace ospectra {

Mesh::Mesh(double a, double b, int k, double s) : a_(a), b_(b), s_(s), k_(k) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) throw InputError("mesh needs finite a < b");
    if (k < 1) throw InputError("mesh needs k >= 1");
    if (!(s > 0.0 && s < 1.0)) throw InputError("fractional order s must lie in (0, 1)");
    h_ = (b - a) / (k + 1);
    nodes_.resize(k);
    for (int j = 0; j < k; ++j) nodes_[j] = a + (j + 1) * h_;
}

int Mesh::element_of(double x) const {
    if (!(x >= a_ && x <= b_)) return -1;
    const int e = static_cast<int>(std::floor((x - a_) / h_));
    return std::clamp(e, 0, k_);
}

double Basis::value(int j, double x) const {
    if (!(x > mesh_.a() && x < mesh_.b())) return 0.0;
    const double xj = mesh_.point(j + 1);
    return std::max(0.0, 1.0 - std::abs(x - xj) / mesh_.h());
}

double Basis::evaluate(const Eigen::VectorXd& c, double x) const {
    const int e = mesh_.element_of(x);
    if (e < 0) return 0.0;
    const int k = mesh_.k();
    const double left = e == 0 ? 0.0 : c[e - 1];
    const double right = e == k ? 0.0 : c[e];
    const double t = (x - mesh_.point(e)) / mesh_.h();
    return (1.0 - t) * left + t * right;
}

Basis Basis::refined() const {
    return Basis(Mesh(mesh_.a(), mesh_.b(), 2 * mesh_.k() + 1, mesh_.s()));
}

Eigen::VectorXd Basis::prolongate(const Eigen::VectorXd& c) const {
    const int k = mesh_.k();
    if (c.size() != k) throw InputError("coefficient vector does not match the basis");
    Eigen::VectorXd out(2 * k + 1);
    for (int j = 0; j < k; ++j) out[2 * j + 1] = c[j];
    for (int j = 0; j <= k; ++j) {
        const double l = j == 0 ? 0.0 : c[j - 1];
        const double r = j == k ? 0.0 : c[j];
        out[2 * j] = 0.5 * (l + r);
    }
    return out;
}

Eigen::MatrixXd Basis::prolongate(const Eigen::MatrixXd& frame) const {
    Eigen::MatrixXd out(2 * mesh_.k() + 1, frame.cols());
    for (Eigen::Index c = 0; c < frame.cols(); ++c) out.col(c) = prolongate(Eigen::VectorXd(frame.col(c)));
    return out;
}

Basis build_mesh(double a, double b, int k, double s) { return Basis(Mesh(a, b, k, s)); }

double holder_quotient(const Eigen::VectorXd& u, const Basis& basis, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw InputError("holder_quotient needs finite points");
    if (x == y) throw InputError("holder_quotient is undefined on the diagonal x = y");
    if (u.size() != basis.size()) throw InputError("coefficient vector does not match the basis");
    return (basis.evaluate(u, x) - basis.evaluate(u, y)) / std::pow(std::abs(x - y), basis.mesh().s());
}

namespace {

GaussRule make_gauss(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 256) throw InputError("Gauss-Legendre order must be in [1, 256]");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussRule>(make_gauss(n));
    return *slot;
}

} // namespace ospectra

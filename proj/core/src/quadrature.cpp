#include <algorithm>
#include <cmath>

#include "ospectra/errors.hpp"
#include "ospectra/mesh.hpp"

namespace ospectra {

namespace {

struct Panel {
    double lo, hi;
    int order;
};

struct Point {
    double t, w;
    int order;
};

// Geometric panels covering (eps, len], finest toward 0. With `taper`, the Gauss order drops
// by one every second panel since the integrand is smoother on small panels relative to their size.
std::vector<Panel> graded_panels(double len, double eps, double grading, int order, bool taper) {
    std::vector<Panel> out;
    if (grading <= 1.0) {
        out.push_back({eps, len, order});
        return out;
    }
    double hi = len;
    for (int j = 0; hi > eps; ++j) {
        const double lo = std::max(eps, hi / grading);
        const int q = taper ? std::max(2, order - j / 2) : order;
        out.push_back({lo, hi, q});
        hi = lo;
    }
    return out;
}

std::vector<Point> panel_points(const std::vector<Panel>& panels) {
    std::vector<Point> out;
    for (const auto& p : panels) {
        const auto& g = gauss_legendre(p.order);
        const double mid = 0.5 * (p.lo + p.hi), half = 0.5 * (p.hi - p.lo);
        for (std::size_t i = 0; i < g.x.size(); ++i) out.push_back({mid + half * g.x[i], half * g.w[i], p.order});
    }
    return out;
}

std::vector<Point> interval_points(double lo, double hi, int order) {
    return panel_points({Panel{lo, hi, order}});
}

// Reduced tensor order for a cell pair separated by gap g >= 2 elements: match the Bernstein
// ellipse decay of the g = 2 cell, whose nearest singularity sits at z = 3 in local coordinates.
int far_order(int order, int gap) {
    auto rho = [](double z) { return z + std::sqrt(z * z - 1.0); };
    const double ref = std::log(rho(3.0));
    const double here = std::log(rho(2.0 * gap - 1.0));
    return std::clamp(static_cast<int>(std::ceil(order * ref / here)), 2, order);
}

} // namespace

PairQuadrature::PairQuadrature(std::vector<PairNode> canonical, PairQuadratureOptions opts)
    : nodes_(std::move(canonical)), canonical_count_(nodes_.size()), opts_(opts) {
    nodes_.reserve(2 * canonical_count_);
    for (std::size_t i = 0; i < canonical_count_; ++i) {
        const PairNode n = nodes_[i];
        nodes_.push_back({n.y, n.x, n.weight, n.region, n.cell_y, n.cell_x});
    }
}

std::vector<double> PairQuadrature::weights() const {
    std::vector<double> w(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) w[i] = nodes_[i].weight;
    return w;
}

PairQuadrature build_pair_quadrature(const Basis& basis, double grading, double exterior_radius, int order) {
    PairQuadratureOptions o;
    o.grading = grading;
    o.exterior_radius = exterior_radius;
    o.order = order;
    return build_pair_quadrature(basis, o);
}

PairQuadrature build_pair_quadrature(const Basis& basis, const PairQuadratureOptions& opts_in) {
    PairQuadratureOptions opts = opts_in;
    const Mesh& mesh = basis.mesh();
    const double a = mesh.a(), b = mesh.b(), h = mesh.h(), s = mesh.s();
    if (!(opts.grading >= 1.0) || !std::isfinite(opts.grading)) throw InputError("grading must be >= 1");
    if (opts.exterior_radius == 0.0) opts.exterior_radius = 20.0 * (b - a);
    if (!(opts.exterior_radius > 0.0) || !std::isfinite(opts.exterior_radius))
        throw InputError("exterior_radius must be positive");
    if (opts.order < 1 || opts.order > 64) throw InputError("quadrature order must be in [1, 64]");
    if (!(opts.diagonal_cutoff > 0.0)) throw InputError("diagonal cutoff must be positive");

    const int K = mesh.element_count();
    const int q = opts.order;
    const double eps = opts.diagonal_cutoff * (b - a);
    const double R = opts.exterior_radius;
    std::vector<PairNode> nodes;

    // Same-element triangles y > x. For integrands built from functions linear on the element
    // the value depends on r = y - x only, so one x-node per r-node with weight (h - r) is exact.
    const auto radial = panel_points(graded_panels(h, eps, opts.grading, q, false));
    for (int e = 0; e < K; ++e) {
        const double x0 = mesh.point(e);
        for (const auto& p : radial) {
            const double r = p.t;
            const double x = x0 + 0.5 * (h - r);
            nodes.push_back({x, x + r, p.w * (h - r) / r, PairRegion::NearDiagonal, e, e});
        }
    }

    // Neighbouring elements sharing the vertex c: Duffy split of the square (xi, eta) in (0, h)^2,
    // x = c - xi, y = c + eta, with the graded variable t = max(xi, eta).
    const auto tpts = panel_points(graded_panels(h, eps, opts.grading, q, true));
    for (int e = 0; e + 1 < K; ++e) {
        const double c = mesh.point(e + 1);
        for (const auto& tp : tpts) {
            const auto& gz = gauss_legendre(tp.order);
            for (std::size_t iz = 0; iz < gz.x.size(); ++iz) {
                const double z = 0.5 * (gz.x[iz] + 1.0);
                const double wz = 0.5 * gz.w[iz];
                const double w = tp.w * wz / (1.0 + z);
                nodes.push_back({c - tp.t * z, c + tp.t, w, PairRegion::NearDiagonal, e, e + 1});
                nodes.push_back({c - tp.t, c + tp.t * z, w, PairRegion::NearDiagonal, e, e + 1});
            }
        }
    }

    // Separated elements: tensor Gauss with order reduced by distance.
    for (int i = 0; i < K; ++i) {
        for (int j = i + 2; j < K; ++j) {
            const int qg = far_order(q, j - i);
            const auto xs = interval_points(mesh.point(i), mesh.point(i + 1), qg);
            const auto ys = interval_points(mesh.point(j), mesh.point(j + 1), qg);
            for (const auto& px : xs)
                for (const auto& py : ys)
                    nodes.push_back({px.t, py.t, px.w * py.w / (py.t - px.t), PairRegion::Far, i, j});
        }
    }

    // Exterior: x in (a, b), y outside. Boundary elements are graded toward the endpoint.
    std::vector<std::pair<Point, int>> xpts;
    for (int e = 0; e < K; ++e) {
        if (e == 0) {
            for (const auto& p : panel_points(graded_panels(h, eps, opts.grading, q, true)))
                xpts.push_back({{a + p.t, p.w, p.order}, e});
        } else if (e == K - 1) {
            for (const auto& p : panel_points(graded_panels(h, eps, opts.grading, q, true)))
                xpts.push_back({{b - p.t, p.w, p.order}, e});
        } else {
            for (const auto& p : interval_points(mesh.point(e), mesh.point(e + 1), q)) xpts.push_back({p, e});
        }
    }
    constexpr double beta = 4.0;    // tail map r = (d + R) sigma^(-beta/s)
    constexpr double tau_panel = 3.0;
    for (const auto& [px, e] : xpts) {
        const int qx = px.order;
        for (int side = 0; side < 2; ++side) {
            const double d = side == 0 ? b - px.t : px.t - a;
            const double dir = side == 0 ? 1.0 : -1.0;
            // Strip r in (d, d + R) in the variable tau = ln(r / d); dr / r = dtau.
            const double T = std::log1p(R / d);
            const int n = std::max(1, static_cast<int>(std::ceil(T / tau_panel)));
            const auto& g = gauss_legendre(qx);
            for (int pi = 0; pi < n; ++pi) {
                const double lo = T * pi / n, hi = T * (pi + 1) / n;
                const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
                for (std::size_t i = 0; i < g.x.size(); ++i) {
                    const double r = d * std::exp(mid + half * g.x[i]);
                    nodes.push_back({px.t, px.t + dir * r, px.w * half * g.w[i], PairRegion::Exterior, e, -1});
                }
            }
            // Tail r > d + R, mapped onto sigma in (0, 1).
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                const double sigma = 0.5 * (g.x[i] + 1.0);
                const double r = (d + R) * std::pow(sigma, -beta / s);
                const double w = px.w * 0.5 * g.w[i] * beta / (s * sigma);
                nodes.push_back({px.t, px.t + dir * r, w, PairRegion::Exterior, e, -1});
            }
        }
    }

    return PairQuadrature(std::move(nodes), opts);
}

} // namespace ospectra

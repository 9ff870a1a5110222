#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ospectra {

// Uniform partition of (a, b) with k interior nodes.
class Mesh {
public:
    Mesh(double a, double b, int k, double s);

    double a() const { return a_; }
    double b() const { return b_; }
    double s() const { return s_; }
    int k() const { return k_; }
    double h() const { return h_; }
    int element_count() const { return k_ + 1; }
    // Interior nodes x_1 < ... < x_k.
    const std::vector<double>& nodes() const { return nodes_; }
    // Grid point j in 0..k+1, with x_0 = a and x_{k+1} = b.
    double point(int j) const { return j == k_ + 1 ? b_ : a_ + j * h_; }
    // Element containing x (clamped); -1 if x lies outside [a, b].
    int element_of(double x) const;

private:
    double a_, b_, s_;
    int k_;
    double h_;
    std::vector<double> nodes_;
};

// Hat functions on the interior nodes, zero outside (a, b).
class Basis {
public:
    explicit Basis(Mesh mesh) : mesh_(std::move(mesh)) {}

    const Mesh& mesh() const { return mesh_; }
    int size() const { return mesh_.k(); }

    double value(int j, double x) const;
    double evaluate(const Eigen::VectorXd& c, double x) const;
    // Uniform refinement: 2k + 1 interior nodes, span(B_k) embedded in span(B_{2k+1}).
    Basis refined() const;
    Eigen::VectorXd prolongate(const Eigen::VectorXd& c) const;
    Eigen::MatrixXd prolongate(const Eigen::MatrixXd& frame) const;

private:
    Mesh mesh_;
};

Basis build_mesh(double a, double b, int k, double s);

double holder_quotient(const Eigen::VectorXd& u, const Basis& basis, double x, double y);

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

const GaussRule& gauss_legendre(int n);

enum class PairRegion { NearDiagonal, Far, Exterior };

struct PairNode {
    double x;
    double y;
    double weight; // includes the kernel 1/|x - y|
    PairRegion region;
    int cell_x; // element index, -1 outside [a, b]
    int cell_y;
};

struct PairQuadratureOptions {
    double grading = 2.0;
    double exterior_radius = 0.0; // 0 selects 20 (b - a)
    int order = 8;
    double diagonal_cutoff = 1e-8; // relative to b - a
};

// Quadrature for dx dy / |x - y| on the off-diagonal part of R^2 where a function
// vanishing outside (a, b) can have nonzero quotient. The first half of the node list is
// canonical; the second half holds the mirrored (y, x) nodes in the same order.
class PairQuadrature {
public:
    PairQuadrature(std::vector<PairNode> canonical, PairQuadratureOptions opts);

    std::span<const PairNode> nodes() const { return nodes_; }
    std::span<const PairNode> canonical() const {
        return std::span<const PairNode>(nodes_).first(canonical_count_);
    }
    std::size_t size() const { return nodes_.size(); }
    std::size_t canonical_count() const { return canonical_count_; }
    const PairQuadratureOptions& options() const { return opts_; }
    std::vector<double> weights() const;

private:
    std::vector<PairNode> nodes_;
    std::size_t canonical_count_;
    PairQuadratureOptions opts_;
};

PairQuadrature build_pair_quadrature(const Basis& basis, double grading, double exterior_radius, int order);
PairQuadrature build_pair_quadrature(const Basis& basis, const PairQuadratureOptions& opts);

} // namespace ospectra

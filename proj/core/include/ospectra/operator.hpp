#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ospectra/mesh.hpp"
#include "ospectra/young.hpp"

namespace ospectra {

// Galerkin data for one (basis, quadrature, M, g). Immutable and cheap to copy.
class AssembledProblem {
public:
    AssembledProblem(Basis basis, PairQuadrature quad, YoungFunction young, GrowthFunction growth);

    static AssembledProblem build(double a, double b, int k, double s, YoungFunction young, GrowthFunction growth,
                                  const PairQuadratureOptions& opts = {});

    const Basis& basis() const { return d_->basis; }
    const PairQuadrature& quadrature() const { return d_->quad; }
    const YoungFunction& young() const { return d_->young; }
    const GrowthFunction& growth() const { return d_->growth; }
    int dim() const { return d_->basis.size(); }

    // Canonical nodes carry weight 2w since (x, y) and (y, x) give the same |D^s u|.
    std::size_t node_count() const { return d_->weights.size(); }
    const std::vector<double>& folded_weights() const { return d_->weights; }

    // D^s phi_j at canonical node n is stencil_val[4n + l] for j = stencil_idx[4n + l].
    const std::vector<int>& stencil_idx() const { return d_->idx; }
    const std::vector<double>& stencil_val() const { return d_->val; }

    void holder_values(const Eigen::VectorXd& u, std::vector<double>& out) const;
    // Sum_n w_n v_n phi-stencil: the transpose of holder_values, weighted.
    Eigen::VectorXd scatter(const std::vector<double>& v) const;

    // Bilinear form of the quadratic modular t^2/2 and the L2 mass matrix; both SPD.
    const Eigen::MatrixXd& linear_stiffness() const { return d_->stiffness; }
    const Eigen::MatrixXd& mass_matrix() const { return d_->mass; }
    const Eigen::LLT<Eigen::MatrixXd>& stiffness_factor() const { return d_->factor; }

private:
    struct Data {
        Basis basis;
        PairQuadrature quad;
        YoungFunction young;
        GrowthFunction growth;
        std::vector<double> weights;
        std::vector<int> idx;
        std::vector<double> val;
        Eigen::MatrixXd stiffness;
        Eigen::MatrixXd mass;
        Eigen::LLT<Eigen::MatrixXd> factor;
    };
    std::shared_ptr<const Data> d_;
};

double modular_Ms(const AssembledProblem& prob, const Eigen::VectorXd& u);
Eigen::VectorXd grad_Ms(const AssembledProblem& prob, const Eigen::VectorXd& u);
double potential_G(const AssembledProblem& prob, const Eigen::VectorXd& u);
Eigen::VectorXd grad_G(const AssembledProblem& prob, const Eigen::VectorXd& u);
double weak_residual(const AssembledProblem& prob, double lambda, const Eigen::VectorXd& u);
double monotonicity_gap(const AssembledProblem& prob, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

struct Gradients {
    double modular = 0.0;
    double potential = 0.0;
    Eigen::VectorXd gM;
    Eigen::VectorXd gG;
};

// Both functionals and both gradients from one pass over the nodes.
Gradients evaluate_all(const AssembledProblem& prob, const Eigen::VectorXd& u);

// max_j |gM_j - lambda gG_j| / (1 + |gM_j|).
double weak_residual(const Eigen::VectorXd& gM, const Eigen::VectorXd& gG, double lambda);

} // namespace ospectra

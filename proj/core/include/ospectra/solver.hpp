#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ospectra/operator.hpp"

namespace ospectra {

struct SolverConfig {
    double kkt_tol = 1e-8;
    int max_iter = 500;
    int restarts = 8;
    std::uint64_t rng_seed = 1;
    int sphere_samples = 0; // 0 means 64 * level
    // Step control.
    double armijo = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 30;
    double switch_tol = 1e-6; // ascent hands over to Newton below this residual
    int newton_max = 50;
    int warmup_iter = 20;
    int max_outer = 50;

    void validate() const;
};

struct Eigenpair {
    double lambda = 0.0;
    Eigen::VectorXd u;
    int level = 1;
    int dim = 0;
    double c_value = 0.0;       // G(u) at the returned point
    double minimax_value = 0.0; // inf of G over the sphere of the best subspace found
    double modular = 0.0;
    double residual = 0.0;
    int iterations = 0;
    Eigen::MatrixXd frame;      // A-orthonormal basis of that subspace (k x level)
};

Eigen::VectorXd normalize_to_manifold(const AssembledProblem& prob, const Eigen::VectorXd& u);

Eigenpair kkt_refine(const AssembledProblem& prob, const Eigen::VectorXd& u0, const SolverConfig& cfg);

// Maximizes G on {M_s = 1}. Without explicit starts, uses the leading eigenvector of the quadratic
// surrogate plus cfg.restarts - 1 random directions; with explicit starts, only those.
Eigenpair solve_first(const AssembledProblem& prob, const SolverConfig& cfg);
Eigenpair solve_first(const AssembledProblem& prob, const SolverConfig& cfg,
                      std::span<const Eigen::VectorXd> starts);

// Max over i-dimensional subspaces W of inf of G over the unit sphere of W. A warm frame
// (k x i) replaces the default candidate set.
Eigenpair solve_level(const AssembledProblem& prob, int i, const SolverConfig& cfg,
                      const Eigen::MatrixXd* warm_frame = nullptr);

struct ContinuationStep {
    int k = 0;
    std::optional<Eigenpair> pair;
    std::string error;
};

// Level i on nested problems k0, 2 k0 + 1, ..., each warm-started from the prolongated frame.
std::vector<ContinuationStep> continuation(std::span<const AssembledProblem> family, int i,
                                           const SolverConfig& cfg);

// Sign convention: nonnegative coefficient sum, first nonzero entry positive on ties.
Eigen::VectorXd sign_normalized(const Eigen::VectorXd& u);

} // namespace ospectra

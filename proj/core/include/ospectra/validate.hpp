#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ospectra/mesh.hpp"
#include "ospectra/operator.hpp"
#include "ospectra/young.hpp"

namespace ospectra {

// |S^0|, the measure of the unit sphere in dimension one.
inline constexpr double kSphereMeasure1D = 2.0;
// 2^{n+1} / |S^{n-1}| for n = 1.
inline constexpr double kTranslationMeasureConstant = 4.0 / kSphereMeasure1D;

struct OracleSpectrum {
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors; // columns, B-orthonormal
    Eigen::MatrixXd stiffness;
    Eigen::MatrixXd mass;
    double max_residual = 0.0;        // max_j |A v - lambda B v| / |A v|
    double orthonormality_error = 0.0; // max |V^T B V - I|
};

// Dense generalized eigenproblem for the linear case. The stiffness is reassembled from
// basis evaluations at every quadrature node, independently of the cached stencils.
OracleSpectrum dense_oracle_p2(const AssembledProblem& prob, int count);

struct TranslationReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0; // lhs / rhs, 0 when both vanish
    bool ok = true;
};

struct LemmaReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};

// Norm form: |tau_h u - u|_M <= 2^{s+1} A |h|^s |D^s u|_{M, nu}.
TranslationReport translation_test(const Basis& basis, const YoungFunction& f, const Eigen::VectorXd& u, double h);
TranslationReport translation_test(const Basis& basis, const PairQuadrature& quad, const YoungFunction& f,
                                   const Eigen::VectorXd& u, double h);

// Modular form: int M(|u(x+h) - u(x)|) dx <= 2 iint M(2^{s+1} |h|^s D^s u) dnu.
LemmaReport lemma_b1_test(const Basis& basis, const YoungFunction& f, const Eigen::VectorXd& u, double h);
LemmaReport lemma_b1_test(const Basis& basis, const PairQuadrature& quad, const YoungFunction& f,
                          const Eigen::VectorXd& u, double h);

struct SubTest {
    std::string name;
    int trials = 0;
    int failures = 0;
    double worst_margin = 0.0; // most negative slack seen; >= 0 when clean
};

struct BatteryReport {
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<SubTest> tests;

    int failures() const;
    bool ok() const { return failures() == 0; }
};

BatteryReport property_battery(const AssembledProblem& prob, int trials, std::uint64_t seed);

} // namespace ospectra

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ospectra {

enum class YoungKind { Power, ExpMinusLinear, Custom };

namespace detail {

// Backing model for a Young function. Arguments are always t >= 0.
class YoungModel {
public:
    virtual ~YoungModel() = default;
    virtual YoungKind kind() const = 0;
    virtual std::optional<double> exponent() const { return std::nullopt; }
    virtual std::string label() const = 0;
    virtual double density(double t) const = 0;
    virtual double primitive(double t) const = 0;
    // Generalized right-continuous inverse of the density; bisection unless overridden.
    virtual double inverse_density(double tau) const;
    virtual std::shared_ptr<const YoungModel> conjugate(std::shared_ptr<const YoungModel> self) const;
    virtual bool closed_form() const { return true; }
    // Points t > 0 where the density is not smooth.
    virtual std::vector<double> kinks() const { return {}; }
};

} // namespace detail

// A Young function M(t) = int_0^|t| m, with m extended to the real line as an odd function.
// Values are immutable and cheap to copy.
class YoungFunction {
public:
    static YoungFunction power(double p);
    static YoungFunction exp_minus_linear();
    // Piecewise-linear density through (0,0) and the given (t, m(t)) knots, extended linearly
    // past the last knot. Knots need not be monotone in m; check_young flags that.
    static YoungFunction custom(std::vector<std::array<double, 2>> table);
    // Density supplied as a callable; M is obtained by adaptive quadrature.
    static YoungFunction from_density(std::function<double(double)> m, std::string label = "density");

    YoungKind kind() const;
    std::optional<double> exponent() const;
    std::string label() const;
    bool closed_form() const;
    std::vector<double> kinks() const { return model_->kinks(); }

    double M(double t) const;
    double m(double t) const;          // t >= 0
    double m_signed(double t) const;
    // Right-continuous generalized inverse sup{t >= 0 : m(t) <= tau}.
    double m_inverse(double tau) const;

    YoungFunction conjugate() const;
    // t -> alpha * M(beta * t).
    YoungFunction scaled(double alpha, double beta = 1.0) const;

    // Unchecked bulk evaluation used by the assembly loops.
    void M_many(std::span<const double> t, std::span<double> out) const;
    void m_signed_many(std::span<const double> t, std::span<double> out) const;

    const detail::YoungModel& model() const { return *model_; }

private:
    explicit YoungFunction(std::shared_ptr<const detail::YoungModel> model);
    std::shared_ptr<const detail::YoungModel> model_;
    enum class Fast { None, ThreeHalves, Quadratic, Cubic } fast_ = Fast::None;
};

double eval_M(const YoungFunction& f, double t);
double eval_m_signed(const YoungFunction& f, double t);
YoungFunction conjugate(const YoungFunction& f);

struct Delta2Report {
    bool satisfied = false;
    std::optional<double> witness_C;
    std::vector<double> grid;
    std::vector<double> ratios;
};

Delta2Report check_delta2(const YoungFunction& f, double t_max, std::size_t samples = 200);

double young_gap(const YoungFunction& f, double t, double tau);
double young_gap(const YoungFunction& f, const YoungFunction& fbar, double t, double tau);

struct YoungDiagnostics {
    bool vanishes_at_zero = false;
    bool positive = false;
    bool monotone = false;
    bool convex = false;
    bool sublinear_at_zero = false;
    bool superlinear_at_infinity = false;
    bool primitive_consistent = false;
    double worst_monotone_violation = 0.0;
    bool ok() const {
        return vanishes_at_zero && positive && monotone && convex && sublinear_at_zero &&
               superlinear_at_infinity && primitive_consistent;
    }
};

YoungDiagnostics check_young(const YoungFunction& f);

enum class GrowthKind { FromYoung, Power };

struct GrowthConstants {
    double a1 = 0.0;
    double a2 = 1.0;
    double a3 = 1.0;
};

// Right-hand side nonlinearity g with primitive G(t) = int_0^|t| g.
class GrowthFunction {
public:
    static GrowthFunction from_young(YoungFunction f, GrowthConstants c = {});
    static GrowthFunction power(double q, GrowthConstants c = {});

    GrowthKind kind() const { return kind_; }
    std::optional<double> exponent() const;
    const GrowthConstants& constants() const { return c_; }
    // True when g(t) = t identically.
    bool is_linear() const;
    std::string label() const;
    // Where g is not smooth, for t > 0.
    std::vector<double> kinks() const;

    double g(double t) const;
    double G(double t) const;

private:
    GrowthFunction() = default;
    GrowthKind kind_ = GrowthKind::FromYoung;
    std::optional<YoungFunction> young_;
    double q_ = 2.0;
    GrowthConstants c_;
};

struct GrowthReport {
    std::size_t samples = 0;
    std::size_t odd_failures = 0;
    std::size_t sign_failures = 0;
    std::size_t bound_failures = 0;
    double worst_margin = 0.0; // min over samples of a1 + a2 m(a3 t) - |g(t)|
    bool ok() const { return odd_failures + sign_failures + bound_failures == 0; }
};

GrowthReport check_growth(const GrowthFunction& g, const YoungFunction& f, std::size_t samples = 1001);

} // namespace ospectra

#include "ospectra/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ospectra/errors.hpp"

namespace ospectra {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double adaptive_integral(const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    // Depth is capped: at 1e-12 an endpoint singularity such as sqrt(t) otherwise refines without end.
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-12, &err);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_finite(double t) {
    if (!std::isfinite(t)) throw InputError("Young function argument must be finite");
}

class PowerModel final : public detail::YoungModel {
public:
    explicit PowerModel(double p) : p_(p) {}
    YoungKind kind() const override { return YoungKind::Power; }
    std::optional<double> exponent() const override { return p_; }
    std::string label() const override { return "power(" + fmt(p_) + ")"; }
    double density(double t) const override { return std::pow(t, p_ - 1.0); }
    double primitive(double t) const override { return std::pow(t, p_) / p_; }
    double inverse_density(double tau) const override { return std::pow(tau, 1.0 / (p_ - 1.0)); }
    std::shared_ptr<const YoungModel> conjugate(std::shared_ptr<const YoungModel>) const override {
        return std::make_shared<PowerModel>(p_ / (p_ - 1.0));
    }

private:
    double p_;
};

class ExpConjugateModel;

// m(t) = e^t - 1, M(t) = e^t - t - 1.
class ExpModel final : public detail::YoungModel {
public:
    YoungKind kind() const override { return YoungKind::ExpMinusLinear; }
    std::string label() const override { return "exp"; }
    double density(double t) const override { return std::expm1(t); }
    double primitive(double t) const override {
        if (t < 1e-3) return t * t * (0.5 + t * (1.0 / 6.0 + t * (1.0 / 24.0 + t / 120.0)));
        return std::expm1(t) - t;
    }
    double inverse_density(double tau) const override { return std::log1p(tau); }
    std::shared_ptr<const YoungModel> conjugate(std::shared_ptr<const YoungModel>) const override;
};

// (1+t) ln(1+t) - t, the Legendre transform of ExpModel.
class ExpConjugateModel final : public detail::YoungModel {
public:
    YoungKind kind() const override { return YoungKind::Custom; }
    std::string label() const override { return "exp-conjugate"; }
    double density(double t) const override { return std::log1p(t); }
    double primitive(double t) const override {
        if (t < 1e-3) return t * t * (0.5 - t * (1.0 / 6.0 - t * (1.0 / 12.0 - t / 20.0)));
        return (1.0 + t) * std::log1p(t) - t;
    }
    double inverse_density(double tau) const override { return std::expm1(tau); }
    std::shared_ptr<const YoungModel> conjugate(std::shared_ptr<const YoungModel>) const override {
        return std::make_shared<ExpModel>();
    }
};

std::shared_ptr<const detail::YoungModel> ExpModel::conjugate(std::shared_ptr<const YoungModel>) const {
    return std::make_shared<ExpConjugateModel>();
}

class TableModel final : public detail::YoungModel {
public:
    explicit TableModel(std::vector<std::array<double, 2>> table) {
        t_.push_back(0.0);
        m_.push_back(0.0);
        for (const auto& [t, m] : table) {
            if (!std::isfinite(t) || !std::isfinite(m)) throw InputError("custom table: non-finite entry");
            if (t == 0.0) {
                if (m != 0.0) throw InputError("custom table: m(0) must be 0");
                continue;
            }
            if (t <= t_.back()) throw InputError("custom table: t values must be strictly increasing");
            if (m <= 0.0) throw InputError("custom table: m(t) must be positive for t > 0");
            t_.push_back(t);
            m_.push_back(m);
        }
        if (t_.size() < 2) throw InputError("custom table: at least one knot with t > 0 required");
        prefix_.assign(t_.size(), 0.0);
        for (std::size_t i = 1; i < t_.size(); ++i)
            prefix_[i] = prefix_[i - 1] + 0.5 * (m_[i] + m_[i - 1]) * (t_[i] - t_[i - 1]);
    }
    YoungKind kind() const override { return YoungKind::Custom; }
    std::string label() const override { return "custom(" + std::to_string(t_.size() - 1) + " knots)"; }
    std::vector<double> kinks() const override { return {t_.begin() + 1, t_.end()}; }
    double density(double t) const override {
        const std::size_t i = segment(t);
        const double slope = (m_[i + 1] - m_[i]) / (t_[i + 1] - t_[i]);
        return m_[i] + slope * (t - t_[i]);
    }
    double primitive(double t) const override {
        const std::size_t i = segment(t);
        const double slope = (m_[i + 1] - m_[i]) / (t_[i + 1] - t_[i]);
        const double d = t - t_[i];
        return prefix_[i] + m_[i] * d + 0.5 * slope * d * d;
    }
    const std::vector<double>& knots_t() const { return t_; }
    const std::vector<double>& knots_m() const { return m_; }

private:
    // Index of the segment containing t; the last segment extends to infinity.
    std::size_t segment(double t) const {
        auto it = std::upper_bound(t_.begin(), t_.end(), t);
        std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
        return std::min(i, t_.size() - 2);
    }
    std::vector<double> t_, m_, prefix_;
};

// Numeric conjugate of an arbitrary model via the Young equality M*(tau) = tau s - M(s), s = m^{-1}(tau).
class InverseModel final : public detail::YoungModel {
public:
    explicit InverseModel(std::shared_ptr<const YoungModel> base) : base_(std::move(base)) {}
    YoungKind kind() const override { return YoungKind::Custom; }
    std::string label() const override { return "conjugate(" + base_->label() + ")"; }
    bool closed_form() const override { return false; }
    double density(double tau) const override { return base_->inverse_density(tau); }
    std::vector<double> kinks() const override {
        std::vector<double> out;
        for (double t : base_->kinks()) out.push_back(base_->density(t));
        return out;
    }
    double primitive(double tau) const override {
        if (tau == 0.0) return 0.0;
        const double s = base_->inverse_density(tau);
        if (!std::isfinite(s)) return kInf;
        return tau * s - base_->primitive(s);
    }
    std::shared_ptr<const YoungModel> conjugate(std::shared_ptr<const YoungModel> self) const override {
        return std::make_shared<InverseModel>(std::move(self));
    }

private:
    std::shared_ptr<const YoungModel> base_;
};

class CallableModel final : public detail::YoungModel {
public:
    CallableModel(std::function<double(double)> m, std::string label) : m_(std::move(m)), label_(std::move(label)) {}
    YoungKind kind() const override { return YoungKind::Custom; }
    std::string label() const override { return label_; }
    bool closed_form() const override { return false; }
    double density(double t) const override { return m_(t); }
    double primitive(double t) const override {
        if (t == 0.0) return 0.0;
        double err = 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(m_, 0.0, t, 12, 1e-10, &err);
    }

private:
    std::function<double(double)> m_;
    std::string label_;
};

// alpha * M(beta t).
class ScaledModel final : public detail::YoungModel {
public:
    ScaledModel(std::shared_ptr<const YoungModel> base, double alpha, double beta)
        : base_(std::move(base)), alpha_(alpha), beta_(beta) {}
    YoungKind kind() const override { return YoungKind::Custom; }
    std::string label() const override {
        return fmt(alpha_) + "*" + base_->label() + "(" + fmt(beta_) + "t)";
    }
    bool closed_form() const override { return base_->closed_form(); }
    double density(double t) const override { return alpha_ * beta_ * base_->density(beta_ * t); }
    double primitive(double t) const override { return alpha_ * base_->primitive(beta_ * t); }
    std::vector<double> kinks() const override {
        auto out = base_->kinks();
        for (double& t : out) t /= beta_;
        return out;
    }
    double inverse_density(double tau) const override {
        return base_->inverse_density(tau / (alpha_ * beta_)) / beta_;
    }
    std::shared_ptr<const YoungModel> conjugate(std::shared_ptr<const YoungModel>) const override {
        return std::make_shared<ScaledModel>(base_->conjugate(base_), alpha_, 1.0 / (alpha_ * beta_));
    }

private:
    std::shared_ptr<const YoungModel> base_;
    double alpha_, beta_;
};

} // namespace

namespace detail {

double YoungModel::inverse_density(double tau) const {
    if (tau <= 0.0) return 0.0;
    if (!std::isfinite(tau)) return kInf;
    double lo = 0.0;
    double hi = 1.0;
    while (density(hi) <= tau) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return kInf;
    }
    for (int it = 0; it < 2000 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (density(mid) <= tau)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::shared_ptr<const YoungModel> YoungModel::conjugate(std::shared_ptr<const YoungModel> self) const {
    return std::make_shared<InverseModel>(std::move(self));
}

} // namespace detail

YoungFunction::YoungFunction(std::shared_ptr<const detail::YoungModel> model) : model_(std::move(model)) {
    if (auto p = model_->exponent(); p && model_->kind() == YoungKind::Power) {
        if (*p == 1.5) fast_ = Fast::ThreeHalves;
        if (*p == 2.0) fast_ = Fast::Quadratic;
        if (*p == 3.0) fast_ = Fast::Cubic;
    }
}

YoungFunction YoungFunction::power(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw InputError("power Young function needs finite p > 1");
    return YoungFunction(std::make_shared<PowerModel>(p));
}

YoungFunction YoungFunction::exp_minus_linear() { return YoungFunction(std::make_shared<ExpModel>()); }

YoungFunction YoungFunction::custom(std::vector<std::array<double, 2>> table) {
    return YoungFunction(std::make_shared<TableModel>(std::move(table)));
}

YoungFunction YoungFunction::from_density(std::function<double(double)> m, std::string label) {
    if (!m) throw InputError("density callable is empty");
    return YoungFunction(std::make_shared<CallableModel>(std::move(m), std::move(label)));
}

YoungKind YoungFunction::kind() const { return model_->kind(); }
std::optional<double> YoungFunction::exponent() const { return model_->exponent(); }
std::string YoungFunction::label() const { return model_->label(); }
bool YoungFunction::closed_form() const { return model_->closed_form(); }

double YoungFunction::M(double t) const {
    require_finite(t);
    return model_->primitive(std::abs(t));
}

double YoungFunction::m(double t) const {
    require_finite(t);
    if (t < 0.0) throw InputError("density m is defined for t >= 0");
    return t == 0.0 ? 0.0 : model_->density(t);
}

double YoungFunction::m_signed(double t) const {
    require_finite(t);
    if (t == 0.0) return 0.0;
    const double v = model_->density(std::abs(t));
    return t < 0.0 ? -v : v;
}

double YoungFunction::m_inverse(double tau) const {
    if (std::isnan(tau) || tau < 0.0) throw InputError("m_inverse needs tau >= 0");
    return model_->inverse_density(tau);
}

YoungFunction YoungFunction::conjugate() const { return YoungFunction(model_->conjugate(model_)); }

YoungFunction YoungFunction::scaled(double alpha, double beta) const {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InputError("scaling factors must be positive");
    return YoungFunction(std::make_shared<ScaledModel>(model_, alpha, beta));
}

void YoungFunction::M_many(std::span<const double> t, std::span<double> out) const {
    const std::size_t n = t.size();
    switch (fast_) {
    case Fast::ThreeHalves:
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::abs(t[i]);
            out[i] = a * std::sqrt(a) / 1.5;
        }
        return;
    case Fast::Quadratic:
        for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * t[i] * t[i];
        return;
    case Fast::Cubic:
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::abs(t[i]);
            out[i] = a * a * a / 3.0;
        }
        return;
    case Fast::None:
        for (std::size_t i = 0; i < n; ++i) out[i] = model_->primitive(std::abs(t[i]));
        return;
    }
}

void YoungFunction::m_signed_many(std::span<const double> t, std::span<double> out) const {
    const std::size_t n = t.size();
    switch (fast_) {
    case Fast::ThreeHalves:
        for (std::size_t i = 0; i < n; ++i) out[i] = std::copysign(std::sqrt(std::abs(t[i])), t[i]);
        return;
    case Fast::Quadratic:
        for (std::size_t i = 0; i < n; ++i) out[i] = t[i];
        return;
    case Fast::Cubic:
        for (std::size_t i = 0; i < n; ++i) out[i] = t[i] * std::abs(t[i]);
        return;
    case Fast::None:
        for (std::size_t i = 0; i < n; ++i) {
            const double v = t[i] == 0.0 ? 0.0 : model_->density(std::abs(t[i]));
            out[i] = t[i] < 0.0 ? -v : v;
        }
        return;
    }
}

double eval_M(const YoungFunction& f, double t) { return f.M(t); }
double eval_m_signed(const YoungFunction& f, double t) { return f.m_signed(t); }
YoungFunction conjugate(const YoungFunction& f) { return f.conjugate(); }

Delta2Report check_delta2(const YoungFunction& f, double t_max, std::size_t samples) {
    if (!(t_max > 1.0) || !std::isfinite(t_max)) throw InputError("check_delta2 needs finite t_max > 1");
    samples = std::max<std::size_t>(samples, 2);
    Delta2Report r;
    r.grid.resize(samples);
    r.ratios.resize(samples);
    const double lmax = std::log(t_max);
    bool finite = true;
    double worst = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        const double t = j + 1 == samples ? t_max : std::exp(lmax * double(j) / double(samples - 1));
        const double ratio = f.M(2.0 * t) / f.M(t);
        r.grid[j] = t;
        r.ratios[j] = ratio;
        if (!std::isfinite(ratio)) finite = false;
        worst = std::max(worst, ratio);
    }
    r.satisfied = finite && !(r.ratios.back() > 1e3 * r.ratios.front());
    if (r.satisfied) r.witness_C = worst;
    return r;
}

double young_gap(const YoungFunction& f, const YoungFunction& fbar, double t, double tau) {
    if (!std::isfinite(t) || !std::isfinite(tau)) throw InputError("young_gap arguments must be finite");
    if (t < 0.0 || tau < 0.0) throw InputError("young_gap arguments must be nonnegative");
    return f.M(t) + fbar.M(tau) - tau * t;
}

double young_gap(const YoungFunction& f, double t, double tau) { return young_gap(f, f.conjugate(), t, tau); }

YoungDiagnostics check_young(const YoungFunction& f) {
    YoungDiagnostics d;
    d.vanishes_at_zero = f.m(0.0) == 0.0 && f.M(0.0) == 0.0;

    constexpr int n = 481;
    std::vector<double> grid(n);
    for (int j = 0; j < n; ++j) grid[j] = std::pow(10.0, -6.0 + 12.0 * j / (n - 1));

    d.positive = true;
    d.monotone = true;
    d.convex = true;
    double prev = 0.0;
    for (double t : grid) {
        const double m = f.m(t);
        const double M = f.M(t);
        if (!(m > 0.0)) d.positive = false;
        if (m < prev) {
            d.monotone = false;
            d.worst_monotone_violation = std::max(d.worst_monotone_violation, prev - m);
        }
        if (std::isfinite(M) && m * t < M * (1.0 - 1e-12)) d.convex = false;
        prev = m;
    }
    d.sublinear_at_zero = f.M(1e-4) / 1e-4 < f.M(1e-2) / 1e-2;
    d.superlinear_at_infinity = f.M(1e2) / 1e2 < f.M(1e4) / 1e4;

    d.primitive_consistent = true;
    std::function<double(double)> m = [&f](double t) { return f.m(t); };
    for (double t : {1e-3, 0.1, 1.0, 10.0}) {
        const double ref = adaptive_integral(m, 0.0, t);
        const double got = f.M(t);
        if (std::abs(got - ref) > 1e-8 * std::max(1e-300, std::abs(ref))) d.primitive_consistent = false;
    }
    return d;
}

GrowthFunction GrowthFunction::from_young(YoungFunction f, GrowthConstants c) {
    if (!(c.a1 >= 0.0) || !(c.a2 > 0.0) || !(c.a3 > 0.0))
        throw InputError("growth constants need a1 >= 0, a2 > 0, a3 > 0");
    GrowthFunction g;
    g.kind_ = GrowthKind::FromYoung;
    g.young_ = std::move(f);
    g.c_ = c;
    return g;
}

GrowthFunction GrowthFunction::power(double q, GrowthConstants c) {
    if (!(q > 1.0) || !std::isfinite(q)) throw InputError("power growth needs finite q > 1");
    if (!(c.a1 >= 0.0) || !(c.a2 > 0.0) || !(c.a3 > 0.0))
        throw InputError("growth constants need a1 >= 0, a2 > 0, a3 > 0");
    GrowthFunction g;
    g.kind_ = GrowthKind::Power;
    g.q_ = q;
    g.c_ = c;
    return g;
}

std::optional<double> GrowthFunction::exponent() const {
    if (kind_ == GrowthKind::Power) return q_;
    if (young_->kind() == YoungKind::Power) return young_->exponent();
    return std::nullopt;
}

bool GrowthFunction::is_linear() const {
    auto q = exponent();
    return q && *q == 2.0;
}

std::string GrowthFunction::label() const {
    if (kind_ == GrowthKind::Power) return "power(" + fmt(q_) + ")";
    return "young:" + young_->label();
}

double GrowthFunction::g(double t) const {
    if (kind_ == GrowthKind::FromYoung) return young_->m_signed(t);
    if (t == 0.0) return 0.0;
    if (q_ == 2.0) return t;
    return std::pow(std::abs(t), q_ - 2.0) * t;
}

std::vector<double> GrowthFunction::kinks() const {
    return kind_ == GrowthKind::FromYoung ? young_->kinks() : std::vector<double>{};
}

double GrowthFunction::G(double t) const {
    if (kind_ == GrowthKind::FromYoung) return young_->M(t);
    if (q_ == 2.0) return 0.5 * t * t;
    return std::pow(std::abs(t), q_) / q_;
}

GrowthReport check_growth(const GrowthFunction& gf, const YoungFunction& f, std::size_t samples) {
    GrowthReport r;
    r.samples = samples;
    r.worst_margin = kInf;
    const auto& c = gf.constants();
    for (std::size_t j = 0; j < samples; ++j) {
        // Log-spaced over [1e-6, 1e3] after t = 0, so both the small and large regimes are seen.
        const double span = double(std::max<std::size_t>(samples, 3) - 2);
        const double t = j == 0 ? 0.0 : std::pow(10.0, -6.0 + 9.0 * double(j - 1) / span);
        const double gp = gf.g(t);
        const double gm = gf.g(-t);
        if (!(gm == -gp)) ++r.odd_failures;
        if (t > 0.0 && !(gp * t > 0.0)) ++r.sign_failures;
        const double bound = c.a1 + c.a2 * f.m(c.a3 * t);
        if (!(std::abs(gp) <= bound * (1.0 + 1e-12))) ++r.bound_failures;
        if (std::isfinite(bound) && std::isfinite(gp)) r.worst_margin = std::min(r.worst_margin, bound - std::abs(gp));
    }
    if (!std::isfinite(r.worst_margin)) r.worst_margin = 0.0;
    return r;
}

} // namespace ospectra

#include "ospectra/orlicz.hpp"

#include <algorithm>
#include <cmath>

#include "ospectra/errors.hpp"

namespace ospectra {

namespace {

void require_aligned(SampledField u, const DiscreteMeasure& mu) {
    if (u.size() != mu.size()) throw InputError("sampled field length does not match the measure");
}

// modular(u / k) without materialising u / k.
double scaled_modular(const YoungFunction& f, SampledField u, const DiscreteMeasure& mu, double k,
                      std::vector<double>& scratch) {
    scratch.resize(u.size());
    const double inv = 1.0 / k;
    for (std::size_t i = 0; i < u.size(); ++i) scratch[i] = u[i] * inv;
    f.M_many(scratch, scratch);
    const auto w = mu.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * scratch[i];
    return sum;
}

} // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<double> weights, MeasureTag tag)
    : weights_(std::move(weights)), tag_(tag) {
    for (double w : weights_)
        if (!(w > 0.0) || !std::isfinite(w)) throw InputError("measure weights must be positive and finite");
}

double DiscreteMeasure::total_mass() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

double modular(const YoungFunction& f, SampledField u, const DiscreteMeasure& mu) {
    require_aligned(u, mu);
    std::vector<double> scratch;
    return scaled_modular(f, u, mu, 1.0, scratch);
}

double luxemburg_norm(const YoungFunction& f, SampledField u, const DiscreteMeasure& mu) {
    require_aligned(u, mu);
    if (std::all_of(u.begin(), u.end(), [](double v) { return v == 0.0; })) return 0.0;

    std::vector<double> scratch;
    auto above = [&](double k) { return !(scaled_modular(f, u, mu, k, scratch) <= 1.0); };

    // Bracket: modular(u/lo) > 1 >= modular(u/hi).
    double lo = 1.0, hi = 1.0;
    if (above(1.0)) {
        while (above(hi)) {
            lo = hi;
            hi *= 2.0;
        }
    } else {
        while (!above(lo)) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-300) return hi;
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (above(mid))
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

HolderReport holder_pairing_check(const YoungFunction& f, SampledField u, SampledField v,
                                  const DiscreteMeasure& mu) {
    require_aligned(u, mu);
    require_aligned(v, mu);
    HolderReport r;
    const auto w = mu.weights();
    for (std::size_t i = 0; i < u.size(); ++i) r.lhs += w[i] * std::abs(u[i] * v[i]);
    r.rhs = 2.0 * luxemburg_norm(f, u, mu) * luxemburg_norm(f.conjugate(), v, mu);
    r.ok = r.lhs <= r.rhs + 1e-8;
    return r;
}

} // namespace ospectra

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ospectra/young.hpp"

namespace ospectra {

enum class MeasureTag { Lebesgue1D, PairNu };

// Positive point masses. On a finite measure the Orlicz class, the space L_M and its
// closure E_M all coincide, so only one modular and one norm are needed.
class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<double> weights, MeasureTag tag);

    std::span<const double> weights() const { return weights_; }
    MeasureTag tag() const { return tag_; }
    std::size_t size() const { return weights_.size(); }
    double total_mass() const;

private:
    std::vector<double> weights_;
    MeasureTag tag_;
};

// Values aligned index-for-index with a DiscreteMeasure.
using SampledField = std::span<const double>;

double modular(const YoungFunction& f, SampledField u, const DiscreteMeasure& mu);
double luxemburg_norm(const YoungFunction& f, SampledField u, const DiscreteMeasure& mu);

struct HolderReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};

HolderReport holder_pairing_check(const YoungFunction& f, SampledField u, SampledField v,
                                  const DiscreteMeasure& mu);

} // namespace ospectra

#pragma once

#include <cstdint>
#include <string>

#include "changedyn/filter.hpp"

namespace changedyn {

struct PredictiveSummary {
    double mean = 0.0;
    double variance = 0.0;
    int n_support = 0;
    bool operator==(const PredictiveSummary&) const = default;
};

namespace predict {

// Moments of the equal-weight Gaussian mixture over null-hypothesis particles
// (runlength >= t - tau). Component i contributes mean alpha_i . x + mu_i and
// variance sigma_i^2; weights are renormalized over the support. Throws
// NoNullHypothesisError on empty support.
PredictiveSummary one_step(const ParticleSet& set, std::int64_t t, std::int64_t tau);
PredictiveSummary one_step(const ParticleSet& set);

std::string prediction_csv_header();
std::string prediction_csv_row(std::int64_t t, const PredictiveSummary& p);

}  // namespace predict
}  // namespace changedyn

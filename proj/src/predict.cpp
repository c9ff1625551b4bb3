#include "changedyn/predict.hpp"

#include <string>

#include "changedyn/csv.hpp"
#include "changedyn/errors.hpp"

namespace changedyn::predict {

PredictiveSummary one_step(const ParticleSet& set, std::int64_t t, std::int64_t tau) {
    const std::int64_t horizon = t - tau;
    const std::span<const double> window(set.x_window);
    double sum_mean = 0.0;
    double sum_second = 0.0;
    int n = 0;
    for (const auto& p : set.particles) {
        if (p.runlength < horizon) continue;
        const double m = ar_step_mean(p.theta, window);
        const double s = p.theta.sigma();
        sum_mean += m;
        sum_second += s * s + m * m;
        ++n;
    }
    if (n == 0) throw NoNullHypothesisError();

    PredictiveSummary out;
    out.n_support = n;
    out.mean = sum_mean / n;
    out.variance = sum_second / n - out.mean * out.mean;
    if (out.variance < 0.0) out.variance = 0.0;  // rounding guard
    return out;
}

PredictiveSummary one_step(const ParticleSet& set) { return one_step(set, set.t, set.tau); }

std::string prediction_csv_header() { return "t,mean,variance,n_support"; }

std::string prediction_csv_row(std::int64_t t, const PredictiveSummary& p) {
    return csv::format_row({std::to_string(t), csv::format_double(p.mean),
                            csv::format_double(p.variance), std::to_string(p.n_support)});
}

}  // namespace changedyn::predict

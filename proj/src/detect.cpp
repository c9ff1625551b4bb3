#include "changedyn/detect.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "changedyn/csv.hpp"
#include "changedyn/errors.hpp"

namespace changedyn {

ThresholdPolicy ThresholdPolicy::standard(double alpha) {
    return {Kind::standard, alpha, 0.0};
}

ThresholdPolicy ThresholdPolicy::conservative(double alpha) {
    return {Kind::conservative, alpha, 0.0};
}

ThresholdPolicy ThresholdPolicy::fixed(double h) { return {Kind::fixed, 0.0, h}; }

namespace detect {

Statistic shiryaev_statistic(const ParticleSet& set, std::int64_t t, std::int64_t tau) {
    if (t < tau) throw InvalidInputError("shiryaev_statistic: t must be >= tau");
    Statistic s;
    const std::int64_t horizon = t - tau;
    for (const auto& p : set.particles) {
        if (p.runlength < horizon)
            ++s.n_change;
        else
            ++s.n_null;
    }
    if (s.n_null == 0) {
        s.z = std::numeric_limits<double>::infinity();
        s.denom_zero = true;
    } else {
        s.z = static_cast<double>(s.n_change) / static_cast<double>(s.n_null);
    }
    return s;
}

Statistic shiryaev_statistic(const ParticleSet& set) {
    return shiryaev_statistic(set, set.t, set.tau);
}

double threshold_value(const ThresholdPolicy& policy) {
    switch (policy.kind) {
        case ThresholdPolicy::Kind::standard:
            if (!(policy.alpha > 0.0) || !(policy.alpha < 1.0))
                throw InvalidConfigError("threshold alpha must lie in (0, 1)");
            return (1.0 - policy.alpha) / policy.alpha;
        case ThresholdPolicy::Kind::conservative: {
            if (!(policy.alpha > 0.0) || !(policy.alpha < 1.0))
                throw InvalidConfigError("threshold alpha must lie in (0, 1)");
            const double half = 0.5 * policy.alpha;
            return (1.0 - half) / half;
        }
        case ThresholdPolicy::Kind::fixed:
            if (!(policy.h > 0.0)) throw InvalidConfigError("fixed threshold must be positive");
            return policy.h;
    }
    throw InvalidConfigError("unknown threshold kind");
}

std::optional<AlarmRecord> step(const ParticleSet& set, const ThresholdPolicy& policy) {
    const Statistic stat = shiryaev_statistic(set);
    const double h = threshold_value(policy);
    if (!stat.denom_zero && !(stat.z > h)) return std::nullopt;

    AlarmRecord alarm;
    alarm.time = set.t;
    alarm.z = stat.z;
    alarm.denom_zero = stat.denom_zero;
    alarm.tau_after = set.t;

    const std::int64_t horizon = set.t - set.tau;
    std::vector<std::int64_t> counts(
        static_cast<std::size_t>(set.config.states.num_states()), 0);
    for (const auto& p : set.particles)
        if (p.runlength < horizon) ++counts[static_cast<std::size_t>(p.state)];
    std::int64_t best = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] > best) {
            best = counts[j];
            alarm.detected_state = static_cast<int>(j);
        }
    }
    return alarm;
}

std::optional<AlarmRecord> step_and_detect(ParticleSet& set, double x_next,
                                           const ThresholdPolicy& policy) {
    filter::step(set, x_next);
    auto alarm = step(set, policy);
    if (alarm) set.tau = alarm->tau_after;
    return alarm;
}

std::string alarm_csv_header() { return "time,z,detected_state,tau_after"; }

std::string alarm_csv_row(const AlarmRecord& alarm) {
    return csv::format_row({std::to_string(alarm.time), csv::format_double(alarm.z),
                            std::to_string(alarm.detected_state),
                            std::to_string(alarm.tau_after)});
}

}  // namespace detect
}  // namespace changedyn

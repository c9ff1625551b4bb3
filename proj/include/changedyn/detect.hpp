#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "changedyn/filter.hpp"

namespace changedyn {

struct AlarmRecord {
    static constexpr int kStateUnspecified = -1;

    std::int64_t time = 0;
    double z = 0.0;  // +inf sentinel when the null count was zero
    bool denom_zero = false;
    int detected_state = kStateUnspecified;
    std::int64_t tau_after = 0;

    bool operator==(const AlarmRecord&) const = default;
};

struct ThresholdPolicy {
    enum class Kind { standard, conservative, fixed };

    Kind kind = Kind::fixed;
    double alpha = 0.0;
    double h = 0.0;

    static ThresholdPolicy standard(double alpha);
    static ThresholdPolicy conservative(double alpha);
    static ThresholdPolicy fixed(double h);
};

namespace detect {

struct Statistic {
    double z = 0.0;
    bool denom_zero = false;
    std::int64_t n_change = 0;
    std::int64_t n_null = 0;
};

// Ratio of change-hypothesis particles (runlength reset since tau) to
// null-hypothesis particles.
Statistic shiryaev_statistic(const ParticleSet& set, std::int64_t t, std::int64_t tau);
Statistic shiryaev_statistic(const ParticleSet& set);

// standard: (1 - alpha) / alpha; conservative: (1 - alpha/2) / (alpha/2).
double threshold_value(const ThresholdPolicy& policy);

// Declares when z strictly exceeds the threshold, or unconditionally when the
// null count is zero. detected_state is the modal state among the
// change-hypothesis particles, ties broken toward the lowest index. The
// caller installs tau_after into the run state.
std::optional<AlarmRecord> step(const ParticleSet& set, const ThresholdPolicy& policy);

// Filter step, detection against the post-resampling set, tau installation.
std::optional<AlarmRecord> step_and_detect(ParticleSet& set, double x_next,
                                           const ThresholdPolicy& policy);

std::string alarm_csv_header();
std::string alarm_csv_row(const AlarmRecord& alarm);

}  // namespace detect
}  // namespace changedyn

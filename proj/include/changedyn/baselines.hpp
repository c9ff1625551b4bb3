#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "changedyn/detect.hpp"
#include "changedyn/filter.hpp"

namespace changedyn {

// Piecewise-constant jump model: theta is pinned to a fixed per-state value
// and does not drift between change-points.
struct ChangePointBaselineConfig {
    int ar_order = 0;
    std::vector<ThetaVector> state_theta;
    std::vector<double> hazard;
    std::vector<std::vector<double>> transition;
    int initial_state = 0;
    ThetaVector initial_theta;
};

// Expresses the baseline through the shared engine: degenerate zero phi
// bounds plus post-change theta jumps.
ModelConfig to_model_config(const ChangePointBaselineConfig& config);

std::optional<AlarmRecord> changepoint_baseline_step(ParticleSet& set, double x_next,
                                                     const ThresholdPolicy& policy);

namespace bocd {

enum class ObservationModel {
    normal_gamma,  // unknown mean and precision
    zero_mean,     // known zero mean, unknown precision
};

struct Config {
    ObservationModel model = ObservationModel::normal_gamma;
    double mu0 = 0.0;
    double kappa0 = 1.0;
    double alpha0 = 1.0;
    double beta0 = 1.0;
    double hazard = 0.01;

    // Hypotheses below this posterior mass are dropped; 0 disables pruning.
    double prune_threshold = 1e-12;

    // mu | lambda ~ N(mu0, 1/(kappa0 lambda)); kappa0 is chosen so the
    // conditional variance of mu equals mu_variance at the prior mean
    // precision alpha0/beta0.
    static Config normal_gamma_from_variance(double mu0, double mu_variance, double alpha0,
                                             double beta0, double hazard);
};

struct Hypothesis {
    std::int64_t runlength = 0;
    double log_prob = 0.0;
    double mu = 0.0;
    double kappa = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
};

struct State {
    Config config;
    std::int64_t t = 0;
    std::vector<Hypothesis> hypotheses;  // runlength-ascending
};

State init(const Config& config);

// Growth and change-point messages with the conjugate Student-t predictive,
// renormalization, and pruning; all in log space.
void step(State& state, double x_next);

// P(r < t - tau) / P(r >= t - tau), with a zero-denominator flag.
std::pair<double, bool> change_ratio(const State& state, std::int64_t tau);

std::optional<AlarmRecord> detect_alarm(const State& state, const ThresholdPolicy& policy,
                                        std::int64_t tau);

double predictive_mean(const State& state);

// Dense posterior over r = 0..t (pruned hypotheses contribute zero).
std::vector<double> runlength_posterior(const State& state);

}  // namespace bocd
}  // namespace changedyn

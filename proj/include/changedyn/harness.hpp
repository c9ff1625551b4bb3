#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "changedyn/baselines.hpp"
#include "changedyn/data.hpp"
#include "changedyn/detect.hpp"
#include "changedyn/predict.hpp"

namespace changedyn::harness {

enum class Method { change_dynamic, change_point, bocd };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct StepTrace {
    std::int64_t t = 0;
    PredictiveSummary prediction;  // made at t-1, for the observation at t
    double z = 0.0;
    double nu_mean = 0.0;
    double nu_sd = 0.0;
    double sigma_mean = 0.0;
};

struct TrialResult {
    std::vector<AlarmRecord> alarms;
    std::vector<StepTrace> trace;
    std::vector<double> nu_final;  // per-particle tracked-component nu at the horizon
};

// Earliest-first assignment of alarms to ground-truth changes: a change
// claims the first unused later alarm whose state matches (or is
// unspecified); every other alarm is false.
struct AlarmMatch {
    std::vector<std::optional<std::size_t>> alarm_for_change;
    std::vector<bool> is_false_alarm;
};

AlarmMatch match_alarms(std::span<const AlarmRecord> alarms,
                        std::span<const data::GroundTruthChange> changes);

// Per-change detection delay; nullopt marks a failure to detect.
std::vector<std::optional<std::int64_t>> compute_add(
    std::span<const AlarmRecord> alarms, std::span<const data::GroundTruthChange> changes);

// pfa = false alarms / total alarms (0 when there are no alarms);
// pma = undetected changes / total changes.
std::pair<double, double> compute_pfa_pma(std::span<const AlarmRecord> alarms,
                                          std::span<const data::GroundTruthChange> changes);

// RMSE between the per-step posterior mean of the tracked nu component and
// the ground-truth drift path.
double nu_posterior_rmse(std::span<const StepTrace> trace,
                         std::span<const data::StreamRecord> stream);

struct DetectorSetup {
    Method method = Method::change_dynamic;
    int n_particles = 2000;
    ThresholdPolicy policy = ThresholdPolicy::fixed(99.0);
    ModelConfig model;                // particle methods
    bocd::Config bocd_config;         // bocd
    std::vector<double> bocd_ar;      // non-empty: bocd scores residuals about this AR model
    int tracked_component = 0;        // theta component index for nu traces
};

// Experiment presets.
ModelConfig mean_drift_model(bool printed_nu_bounds = false);
ChangePointBaselineConfig mean_drift_baseline(bool printed_state_values = false);
bocd::Config mean_drift_bocd();
DetectorSetup mean_drift_setup(Method method, const ThresholdPolicy& policy,
                               int n_particles = 2000);

ModelConfig seizure_model(const data::SeizureSurrogateSpec& spec);
ChangePointBaselineConfig seizure_baseline(const data::SeizureSurrogateSpec& spec);
DetectorSetup seizure_setup(const data::SeizureSurrogateSpec& spec, Method method,
                            const ThresholdPolicy& policy, int n_particles = 5000);

TrialResult run_trial(const DetectorSetup& setup, std::span<const data::StreamRecord> stream,
                      std::uint64_t seed, int particle_threads = 1);

struct TrialMetrics {
    double rmsfe_x = 0.0;   // forecast RMSE against realized observations
    double rmsfe_mu = 0.0;  // RMSE against the true mean path; NaN without truth
    double rmse_nu = 0.0;   // NaN without truth
    std::vector<std::optional<std::int64_t>> delays;
    std::int64_t false_alarms = 0;
    std::int64_t total_alarms = 0;
};

TrialMetrics trial_metrics(const TrialResult& result,
                           std::span<const data::StreamRecord> stream,
                           std::span<const data::GroundTruthChange> changes);

struct MetricsReport {
    int trials = 0;
    double rmsfe_x = 0.0;
    double rmsfe_mu = 0.0;
    double rmse_nu = 0.0;
    double pfa = 0.0;  // pooled over trials
    double pma = 0.0;
    double mean_alarms = 0.0;
    std::vector<double> add;    // mean delay per change, over trials that detected it
    std::vector<int> detected;  // number of trials that detected each change
};

MetricsReport aggregate_metrics(const std::vector<TrialMetrics>& trials);

struct GeneratorSpec {
    enum class Kind { mean_drift, seizure_surrogate, csv };
    Kind kind = Kind::mean_drift;
    data::SyntheticSpec mean_drift = data::SyntheticSpec::mean_drift_default(0);
    data::SeizureSurrogateSpec seizure;
    std::string csv_path;
    std::string csv_column = "x";
    std::string csv_preset = "mean_drift";  // detector preset for csv input
};

struct ExperimentConfig {
    int schema_version = 1;
    Method method = Method::change_dynamic;
    int n_particles = 2000;
    int trials = 30;
    std::uint64_t seed = 1;
    int threads = 1;           // trial-level parallelism
    int particle_threads = 1;  // within-trial parallelism
    ThresholdPolicy policy = ThresholdPolicy::fixed(99.0);
    GeneratorSpec generator;
    bool printed_nu_bounds = false;       // alternative published nu interval
    bool printed_baseline_values = false; // alternative published baseline levels
    std::string output_dir;               // empty: no artifact files
};

ExperimentConfig load_config(const std::string& path);

// Streams (one per trial), detector, and seeds are all derived from the run
// seed, so a report is a pure function of the configuration.
MetricsReport run_experiment(const ExperimentConfig& config);

// One full experiment per threshold, sharing per-trial streams across
// thresholds. Writes sweep.csv when an output directory is set.
std::vector<std::pair<double, MetricsReport>> run_sweep(const ExperimentConfig& config,
                                                        std::span<const double> thresholds);

std::vector<data::StreamRecord> make_stream(const GeneratorSpec& generator,
                                            std::uint64_t stream_seed);
DetectorSetup make_setup(const ExperimentConfig& config);

void write_trial_artifacts(const std::string& dir, const TrialResult& result);
void write_report_csv(const std::string& path, const std::string& method,
                      double threshold, const MetricsReport& report);

}  // namespace changedyn::harness

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace changedyn::data {

struct StreamRecord {
    std::int64_t t = 0;
    double x = 0.0;
    std::optional<double> mu_true;
    std::optional<int> state_true;
    std::optional<double> nu_true;  // drift of the tracked component
    bool operator==(const StreamRecord&) const = default;
};

struct GroundTruthChange {
    std::int64_t time = 0;  // last step of the old regime
    int post_state = 0;
};

struct Segment {
    std::int64_t start = 0;  // 1-based, inclusive
    std::int64_t end = 0;    // inclusive
    int state = 0;
    double nu = 0.0;
};

// Gaussian observations around a mean that drifts linearly per segment.
struct SyntheticSpec {
    std::int64_t horizon = 225;
    double mu0 = 1.0;
    double noise_sd = 0.05;
    std::vector<Segment> segments;  // must tile 1..horizon
    std::uint64_t seed = 0;

    static SyntheticSpec mean_drift_default(std::uint64_t seed);
};

std::vector<StreamRecord> generate_mean_drift(const SyntheticSpec& spec);

// AR(2) observations whose innovation scale ramps between log-sigma levels:
// stationary head, linear rise over the onset window, plateau, linear fall
// over the termination window, stationary tail. States 0/1/2 mark
// stationarity, rising scale, and falling scale.
struct SeizureSurrogateSpec {
    std::int64_t head = 400;
    std::int64_t onset = 600;
    std::int64_t plateau = 400;
    std::int64_t termination = 600;
    std::int64_t tail = 100;
    double alpha1 = 0.62;
    double alpha2 = -0.18;
    double log_sigma_lo = -1.0;
    double log_sigma_hi = 1.0;
    std::uint64_t seed = 0;

    std::int64_t horizon() const { return head + onset + plateau + termination + tail; }
    std::vector<Segment> segments() const;
};

std::vector<StreamRecord> generate_seizure_surrogate(const SeizureSurrogateSpec& spec);

// One change per segment boundary; post_state is the entered segment's state.
std::vector<GroundTruthChange> truth_changes(const std::vector<Segment>& segments);

// Anti-alias low-pass (4th-order Butterworth run forward-backward for zero
// phase) at the source rate, then decimation by source_hz / target_hz.
std::vector<double> lowpass_decimate(const std::vector<double>& raw, double source_hz,
                                     double target_hz, double lowpass_hz);

// Center and scale to zero mean, unit standard deviation. Throws
// DegenerateInputError on (near-)constant input.
std::vector<double> znormalize(const std::vector<double>& x);

std::vector<double> preprocess_eeg(const std::vector<double>& raw, double source_hz,
                                   double target_hz, double lowpass_hz);

struct ArFit {
    std::vector<double> alpha;  // alpha[0] multiplies lag 1
    double log_sigma = 0.0;     // log RMSE of the residuals
    double r_squared = 0.0;
};

// Least squares on lagged regressors without intercept.
ArFit fit_ar(const std::vector<double>& train, int order);

struct CsvColumnSpec {
    std::string x = "x";
    std::string t = "t";
    std::string mu_true = "mu_true";
    std::string state_true = "state_true";
    std::string nu_true = "nu_true";
};

// Headered RFC-4180 CSV. The observation column is required; time and ground
// truth columns are attached when present. Errors carry 1-based data row
// numbers.
std::vector<StreamRecord> read_csv_stream(const std::string& path,
                                          const CsvColumnSpec& columns = {});

void write_stream_csv(const std::string& path, const std::vector<StreamRecord>& records);

}  // namespace changedyn::data

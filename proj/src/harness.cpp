#include "changedyn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "changedyn/csv.hpp"
#include "changedyn/errors.hpp"
#include "changedyn/parallel.hpp"

namespace changedyn::harness {

namespace {

constexpr std::uint64_t kStreamChannel = 21;
constexpr std::uint64_t kTrialChannel = 22;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_ignoring_nan(const std::vector<double>& v) {
    double sum = 0.0;
    int n = 0;
    for (double x : v) {
        if (std::isnan(x)) continue;
        sum += x;
        ++n;
    }
    return n ? sum / n : kNaN;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::change_dynamic: return "change_dynamic";
        case Method::change_point: return "change_point";
        case Method::bocd: return "bocd";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "change_dynamic") return Method::change_dynamic;
    if (name == "change_point") return Method::change_point;
    if (name == "bocd") return Method::bocd;
    throw InvalidConfigError("unknown method '" + name + "'");
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

ModelConfig mean_drift_model(bool printed_nu_bounds) {
    // theta components: [mu, log_sigma]; sigma is known and held fixed.
    ModelConfig m;
    m.ar_order = 0;
    m.initial_theta = ThetaVector{{}, 1.0, std::log(0.05)};
    m.initial_state = 0;

    StateSpec st;
    st.hazard = {1.0 / 25.0, 1.0 / 100.0};
    st.transition = {{0.0, 1.0}, {1.0, 0.0}};
    st.bounds.resize(2);
    st.bounds[0].lo = PhiVector{{0.0, 0.0}, {1e-4, 0.0}};
    st.bounds[0].hi = PhiVector{{0.0, 0.0}, {1e-3, 0.0}};
    const double nu_lo = printed_nu_bounds ? -0.018 : -0.0022;
    const double nu_hi = printed_nu_bounds ? -0.0022 : -0.0018;
    st.bounds[1].lo = PhiVector{{nu_lo, 0.0}, {1e-4, 0.0}};
    st.bounds[1].hi = PhiVector{{nu_hi, 0.0}, {1e-3, 0.0}};
    m.states = std::move(st);
    return m;
}

ChangePointBaselineConfig mean_drift_baseline(bool printed_state_values) {
    ChangePointBaselineConfig c;
    c.ar_order = 0;
    const double lsig = std::log(0.05);
    const double v0 = printed_state_values ? 0.0 : 1.0;
    c.state_theta = {ThetaVector{{}, v0, lsig}, ThetaVector{{}, 0.8, lsig}};
    c.hazard = {1.0 / 25.0, 1.0 / 100.0};
    c.transition = {{0.0, 1.0}, {1.0, 0.0}};
    c.initial_state = 0;
    c.initial_theta = ThetaVector{{}, 1.0, lsig};
    return c;
}

bocd::Config mean_drift_bocd() {
    return bocd::Config::normal_gamma_from_variance(1.0, 0.03, 1e-3, 1e-3, 2.0 / 125.0);
}

DetectorSetup mean_drift_setup(Method method, const ThresholdPolicy& policy, int n_particles) {
    DetectorSetup s;
    s.method = method;
    s.policy = policy;
    s.n_particles = n_particles;
    s.tracked_component = 0;  // mu
    switch (method) {
        case Method::change_dynamic: s.model = mean_drift_model(); break;
        case Method::change_point: s.model = to_model_config(mean_drift_baseline()); break;
        case Method::bocd: s.bocd_config = mean_drift_bocd(); break;
    }
    return s;
}

ModelConfig seizure_model(const data::SeizureSurrogateSpec& spec) {
    // theta components: [alpha1, alpha2, mu, log_sigma]; only log_sigma drifts.
    ModelConfig m;
    m.ar_order = 2;
    m.initial_theta = ThetaVector{{spec.alpha1, spec.alpha2}, 0.0, spec.log_sigma_lo};
    m.initial_state = 0;

    // nu bounds from an assumed transition duration between 225 and 900 steps
    // for a swing of 2 in log sigma; gamma an order of magnitude below nu.
    const double nu_lo = 2.0 / 900.0;
    const double nu_hi = 2.0 / 225.0;
    const double gamma = 3e-4;

    auto bounds = [gamma](double lo, double hi) {
        PhiBounds b;
        b.lo = PhiVector{{0.0, 0.0, 0.0, lo}, {0.0, 0.0, 0.0, gamma}};
        b.hi = PhiVector{{0.0, 0.0, 0.0, hi}, {0.0, 0.0, 0.0, gamma}};
        return b;
    };
    StateSpec st;
    st.bounds = {bounds(0.0, 0.0), bounds(nu_lo, nu_hi), bounds(-nu_hi, -nu_lo)};
    st.hazard = {1.0 / 1000.0, 1.0 / 400.0, 1.0 / 400.0};
    st.transition = {{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}};
    m.states = std::move(st);
    return m;
}

ChangePointBaselineConfig seizure_baseline(const data::SeizureSurrogateSpec& spec) {
    ChangePointBaselineConfig c;
    c.ar_order = 2;
    c.state_theta = {ThetaVector{{spec.alpha1, spec.alpha2}, 0.0, spec.log_sigma_lo},
                     ThetaVector{{spec.alpha1, spec.alpha2}, 0.0, spec.log_sigma_hi}};
    c.hazard = {1.0 / 1000.0, 1.0 / 400.0};
    c.transition = {{0.0, 1.0}, {1.0, 0.0}};
    c.initial_state = 0;
    c.initial_theta = c.state_theta[0];
    return c;
}

DetectorSetup seizure_setup(const data::SeizureSurrogateSpec& spec, Method method,
                            const ThresholdPolicy& policy, int n_particles) {
    DetectorSetup s;
    s.method = method;
    s.policy = policy;
    s.n_particles = n_particles;
    s.tracked_component = 3;  // log_sigma
    switch (method) {
        case Method::change_dynamic: s.model = seizure_model(spec); break;
        case Method::change_point: s.model = to_model_config(seizure_baseline(spec)); break;
        case Method::bocd: {
            bocd::Config c;
            c.model = bocd::ObservationModel::zero_mean;
            c.alpha0 = 1e-3;
            c.beta0 = 1e-3;
            c.hazard = 1.0 / 1000.0;
            s.bocd_config = c;
            s.bocd_ar = {spec.alpha1, spec.alpha2};
            break;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// trial execution
// ---------------------------------------------------------------------------

namespace {

TrialResult run_particle_trial(const DetectorSetup& setup,
                               std::span<const data::StreamRecord> stream, std::uint64_t seed,
                               int particle_threads) {
    const ModelConfig& cfg = setup.model;
    const std::vector<double> window0(static_cast<std::size_t>(cfg.ar_order), 0.0);
    ParticleSet set = filter::init(cfg, setup.n_particles, window0, seed);
    set.n_threads = particle_threads;

    const int tracked = setup.tracked_component;
    TrialResult out;
    out.trace.reserve(stream.size());

    for (const auto& rec : stream) {
        StepTrace tr;
        tr.t = rec.t;
        tr.prediction = predict::one_step(set);

        filter::step(set, rec.x);
        const auto stat = detect::shiryaev_statistic(set);
        tr.z = stat.z;
        if (auto alarm = detect::step(set, setup.policy)) {
            alarm->time = rec.t;
            alarm->tau_after = set.t;
            set.tau = set.t;
            out.alarms.push_back(*alarm);
        }

        double nu_sum = 0.0, nu_sq = 0.0, sig_sum = 0.0;
        for (const auto& p : set.particles) {
            const double nu = p.phi.nu[static_cast<std::size_t>(tracked)];
            nu_sum += nu;
            nu_sq += nu * nu;
            sig_sum += p.theta.sigma();
        }
        const double n = set.size();
        tr.nu_mean = nu_sum / n;
        tr.nu_sd = std::sqrt(std::max(0.0, nu_sq / n - tr.nu_mean * tr.nu_mean));
        tr.sigma_mean = sig_sum / n;
        out.trace.push_back(tr);
    }

    out.nu_final.reserve(set.particles.size());
    for (const auto& p : set.particles)
        out.nu_final.push_back(p.phi.nu[static_cast<std::size_t>(tracked)]);
    return out;
}

TrialResult run_bocd_trial(const DetectorSetup& setup,
                           std::span<const data::StreamRecord> stream) {
    bocd::State st = bocd::init(setup.bocd_config);
    std::vector<double> arw(setup.bocd_ar.size(), 0.0);  // raw-x window, newest first
    std::int64_t tau_steps = 0;

    TrialResult out;
    out.trace.reserve(stream.size());
    for (const auto& rec : stream) {
        double cond_mean = 0.0;
        for (std::size_t i = 0; i < arw.size(); ++i) cond_mean += setup.bocd_ar[i] * arw[i];

        StepTrace tr;
        tr.t = rec.t;
        tr.prediction.mean = cond_mean + bocd::predictive_mean(st);
        tr.prediction.variance = kNaN;  // heavy-tailed predictive early on
        tr.prediction.n_support = static_cast<int>(st.hypotheses.size());

        bocd::step(st, rec.x - cond_mean);
        const auto [z, denom_zero] = bocd::change_ratio(st, tau_steps);
        tr.z = z;
        if (auto alarm = bocd::detect_alarm(st, setup.policy, tau_steps)) {
            tau_steps = st.t;
            alarm->time = rec.t;
            alarm->tau_after = rec.t;
            out.alarms.push_back(*alarm);
        }
        out.trace.push_back(tr);

        if (!arw.empty()) {
            for (std::size_t k = arw.size(); k-- > 1;) arw[k] = arw[k - 1];
            arw[0] = rec.x;
        }
    }
    return out;
}

}  // namespace

TrialResult run_trial(const DetectorSetup& setup, std::span<const data::StreamRecord> stream,
                      std::uint64_t seed, int particle_threads) {
    if (setup.method == Method::bocd) return run_bocd_trial(setup, stream);
    return run_particle_trial(setup, stream, seed, particle_threads);
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

AlarmMatch match_alarms(std::span<const AlarmRecord> alarms,
                        std::span<const data::GroundTruthChange> changes) {
    AlarmMatch m;
    m.alarm_for_change.assign(changes.size(), std::nullopt);
    std::vector<bool> used(alarms.size(), false);
    for (std::size_t c = 0; c < changes.size(); ++c) {
        for (std::size_t a = 0; a < alarms.size(); ++a) {
            if (used[a]) continue;
            const auto& al = alarms[a];
            if (al.time <= changes[c].time) continue;
            if (al.detected_state != AlarmRecord::kStateUnspecified &&
                al.detected_state != changes[c].post_state)
                continue;
            used[a] = true;
            m.alarm_for_change[c] = a;
            break;
        }
    }
    m.is_false_alarm.resize(alarms.size());
    for (std::size_t a = 0; a < alarms.size(); ++a) m.is_false_alarm[a] = !used[a];
    return m;
}

std::vector<std::optional<std::int64_t>> compute_add(
    std::span<const AlarmRecord> alarms, std::span<const data::GroundTruthChange> changes) {
    const auto m = match_alarms(alarms, changes);
    std::vector<std::optional<std::int64_t>> delays(changes.size());
    for (std::size_t c = 0; c < changes.size(); ++c)
        if (m.alarm_for_change[c])
            delays[c] = alarms[*m.alarm_for_change[c]].time - changes[c].time;
    return delays;
}

std::pair<double, double> compute_pfa_pma(std::span<const AlarmRecord> alarms,
                                          std::span<const data::GroundTruthChange> changes) {
    const auto m = match_alarms(alarms, changes);
    std::int64_t false_count = 0;
    for (bool f : m.is_false_alarm) false_count += f;
    const double pfa =
        alarms.empty() ? 0.0 : static_cast<double>(false_count) / static_cast<double>(alarms.size());
    std::int64_t missed = 0;
    for (const auto& a : m.alarm_for_change) missed += !a.has_value();
    const double pma =
        changes.empty() ? 0.0 : static_cast<double>(missed) / static_cast<double>(changes.size());
    return {pfa, pma};
}

double nu_posterior_rmse(std::span<const StepTrace> trace,
                         std::span<const data::StreamRecord> stream) {
    if (trace.size() != stream.size())
        throw InvalidInputError("nu_posterior_rmse: trace and stream lengths differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (!stream[i].nu_true)
            throw InvalidInputError("nu_posterior_rmse: ground-truth nu missing");
        const double d = trace[i].nu_mean - *stream[i].nu_true;
        acc += d * d;
    }
    return trace.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(trace.size()));
}

TrialMetrics trial_metrics(const TrialResult& result,
                           std::span<const data::StreamRecord> stream,
                           std::span<const data::GroundTruthChange> changes) {
    if (result.trace.size() != stream.size())
        throw InvalidInputError("trial_metrics: trace and stream lengths differ");

    TrialMetrics m;
    double acc_x = 0.0, acc_mu = 0.0, acc_nu = 0.0;
    bool have_mu = !stream.empty();
    bool have_nu = !stream.empty();
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const double pred = result.trace[i].prediction.mean;
        acc_x += (pred - stream[i].x) * (pred - stream[i].x);
        if (stream[i].mu_true)
            acc_mu += (pred - *stream[i].mu_true) * (pred - *stream[i].mu_true);
        else
            have_mu = false;
        if (stream[i].nu_true)
            acc_nu += (result.trace[i].nu_mean - *stream[i].nu_true) *
                      (result.trace[i].nu_mean - *stream[i].nu_true);
        else
            have_nu = false;
    }
    const double n = static_cast<double>(stream.size());
    m.rmsfe_x = stream.empty() ? kNaN : std::sqrt(acc_x / n);
    m.rmsfe_mu = have_mu ? std::sqrt(acc_mu / n) : kNaN;
    m.rmse_nu = have_nu ? std::sqrt(acc_nu / n) : kNaN;

    m.delays = compute_add(result.alarms, changes);
    const auto match = match_alarms(result.alarms, changes);
    for (bool f : match.is_false_alarm) m.false_alarms += f;
    m.total_alarms = static_cast<std::int64_t>(result.alarms.size());
    return m;
}

MetricsReport aggregate_metrics(const std::vector<TrialMetrics>& trials) {
    MetricsReport r;
    r.trials = static_cast<int>(trials.size());
    if (trials.empty()) return r;

    std::vector<double> vx, vmu, vnu;
    std::int64_t false_total = 0, alarms_total = 0;
    const std::size_t n_changes = trials.front().delays.size();
    r.add.assign(n_changes, 0.0);
    r.detected.assign(n_changes, 0);
    std::int64_t missed = 0;

    for (const auto& t : trials) {
        vx.push_back(t.rmsfe_x);
        vmu.push_back(t.rmsfe_mu);
        vnu.push_back(t.rmse_nu);
        false_total += t.false_alarms;
        alarms_total += t.total_alarms;
        for (std::size_t c = 0; c < n_changes; ++c) {
            if (t.delays[c]) {
                r.add[c] += static_cast<double>(*t.delays[c]);
                r.detected[c] += 1;
            } else {
                ++missed;
            }
        }
    }
    for (std::size_t c = 0; c < n_changes; ++c)
        r.add[c] = r.detected[c] ? r.add[c] / r.detected[c] : kNaN;

    r.rmsfe_x = mean_ignoring_nan(vx);
    r.rmsfe_mu = mean_ignoring_nan(vmu);
    r.rmse_nu = mean_ignoring_nan(vnu);
    r.pfa = alarms_total ? static_cast<double>(false_total) / static_cast<double>(alarms_total)
                         : 0.0;
    r.pma = n_changes ? static_cast<double>(missed) /
                            static_cast<double>(n_changes * trials.size())
                      : 0.0;
    r.mean_alarms = static_cast<double>(alarms_total) / static_cast<double>(trials.size());
    return r;
}

// ---------------------------------------------------------------------------
// experiment orchestration
// ---------------------------------------------------------------------------

std::vector<data::StreamRecord> make_stream(const GeneratorSpec& generator,
                                            std::uint64_t stream_seed) {
    switch (generator.kind) {
        case GeneratorSpec::Kind::mean_drift: {
            data::SyntheticSpec spec = generator.mean_drift;
            spec.seed = stream_seed;
            return data::generate_mean_drift(spec);
        }
        case GeneratorSpec::Kind::seizure_surrogate: {
            data::SeizureSurrogateSpec spec = generator.seizure;
            spec.seed = stream_seed;
            return data::generate_seizure_surrogate(spec);
        }
        case GeneratorSpec::Kind::csv: {
            data::CsvColumnSpec cols;
            cols.x = generator.csv_column;
            return data::read_csv_stream(generator.csv_path, cols);
        }
    }
    throw InvalidConfigError("unknown generator kind");
}

DetectorSetup make_setup(const ExperimentConfig& config) {
    const auto& gen = config.generator;
    const bool seizure = gen.kind == GeneratorSpec::Kind::seizure_surrogate ||
                         (gen.kind == GeneratorSpec::Kind::csv && gen.csv_preset == "seizure");
    DetectorSetup setup =
        seizure ? seizure_setup(gen.seizure, config.method, config.policy, config.n_particles)
                : mean_drift_setup(config.method, config.policy, config.n_particles);
    if (!seizure) {
        if (config.method == Method::change_dynamic && config.printed_nu_bounds)
            setup.model = mean_drift_model(true);
        if (config.method == Method::change_point && config.printed_baseline_values)
            setup.model = to_model_config(mean_drift_baseline(true));
    }
    return setup;
}

namespace {

// CSV input with the seizure preset: fit the AR model for bocd residuals from
// the leading portion of the stream.
void finalize_setup(DetectorSetup& setup, const ExperimentConfig& config,
                    std::span<const data::StreamRecord> stream) {
    if (setup.method != Method::bocd || !setup.bocd_ar.empty()) return;
    if (config.generator.kind != GeneratorSpec::Kind::csv ||
        config.generator.csv_preset != "seizure")
        return;
    std::vector<double> head;
    const std::size_t train = std::min<std::size_t>(3000, stream.size() / 2);
    head.reserve(train);
    for (std::size_t i = 0; i < train; ++i) head.push_back(stream[i].x);
    setup.bocd_ar = data::fit_ar(head, 2).alpha;
}

std::vector<data::GroundTruthChange> stream_truth_changes(const ExperimentConfig& config) {
    switch (config.generator.kind) {
        case GeneratorSpec::Kind::mean_drift:
            return data::truth_changes(config.generator.mean_drift.segments);
        case GeneratorSpec::Kind::seizure_surrogate:
            return data::truth_changes(config.generator.seizure.segments());
        case GeneratorSpec::Kind::csv: {
            // Reconstruct boundaries from state_true when present.
            const auto stream = make_stream(config.generator, 0);
            std::vector<data::GroundTruthChange> out;
            for (std::size_t i = 1; i < stream.size(); ++i) {
                if (stream[i].state_true && stream[i - 1].state_true &&
                    *stream[i].state_true != *stream[i - 1].state_true)
                    out.push_back({stream[i].t - 1, *stream[i].state_true});
            }
            return out;
        }
    }
    return {};
}

}  // namespace

void write_trial_artifacts(const std::string& dir, const TrialResult& result) {
    std::filesystem::create_directories(dir);

    std::ofstream alarms(dir + "/alarms.csv", std::ios::binary);
    alarms << detect::alarm_csv_header() << "\n";
    for (const auto& a : result.alarms) alarms << detect::alarm_csv_row(a) << "\n";

    std::ofstream preds(dir + "/predictions.csv", std::ios::binary);
    preds << predict::prediction_csv_header() << "\n";
    for (const auto& tr : result.trace)
        preds << predict::prediction_csv_row(tr.t, tr.prediction) << "\n";

    std::ofstream nu(dir + "/nu_posterior.csv", std::ios::binary);
    nu << "t,nu_mean,nu_sd,sigma_mean,z\n";
    for (const auto& tr : result.trace)
        nu << csv::format_row({std::to_string(tr.t), csv::format_double(tr.nu_mean),
                               csv::format_double(tr.nu_sd), csv::format_double(tr.sigma_mean),
                               csv::format_double(tr.z)})
           << "\n";

    if (!result.nu_final.empty()) {
        std::ofstream fin(dir + "/nu_final.csv", std::ios::binary);
        fin << "nu\n";
        for (double v : result.nu_final) fin << csv::format_double(v) << "\n";
    }
}

void write_report_csv(const std::string& path, const std::string& method, double threshold,
                      const MetricsReport& report) {
    std::ofstream out(path, std::ios::binary);
    std::string header =
        "method,threshold,trials,rmsfe_x,rmsfe_mu,rmse_nu,pfa,pma,mean_alarms";
    std::vector<std::string> fields{method,
                                    csv::format_double(threshold),
                                    std::to_string(report.trials),
                                    csv::format_double(report.rmsfe_x),
                                    csv::format_double(report.rmsfe_mu),
                                    csv::format_double(report.rmse_nu),
                                    csv::format_double(report.pfa),
                                    csv::format_double(report.pma),
                                    csv::format_double(report.mean_alarms)};
    for (std::size_t c = 0; c < report.add.size(); ++c) {
        header += ",add" + std::to_string(c + 1) + ",detected" + std::to_string(c + 1);
        fields.push_back(csv::format_double(report.add[c]));
        fields.push_back(std::to_string(report.detected[c]));
    }
    out << header << "\n" << csv::format_row(fields) << "\n";
}

MetricsReport run_experiment(const ExperimentConfig& config) {
    if (config.trials < 1) throw InvalidConfigError("trials must be at least 1");

    const auto changes = stream_truth_changes(config);
    DetectorSetup setup = make_setup(config);

    std::vector<data::StreamRecord> shared_stream;
    if (config.generator.kind == GeneratorSpec::Kind::csv) {
        shared_stream = make_stream(config.generator, 0);
        finalize_setup(setup, config, shared_stream);
    }

    std::vector<TrialResult> results(static_cast<std::size_t>(config.trials));
    std::vector<TrialMetrics> metrics(static_cast<std::size_t>(config.trials));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(config.trials));

    parallel_for(config.trials, config.threads, [&](int trial) {
        try {
            const auto ti = static_cast<std::uint64_t>(trial);
            const std::vector<data::StreamRecord>& stream =
                config.generator.kind == GeneratorSpec::Kind::csv
                    ? shared_stream
                    : make_stream(config.generator,
                                  RngStream::derive(config.seed, kStreamChannel, ti)());
            const std::uint64_t trial_seed = RngStream::derive(config.seed, kTrialChannel, ti)();
            results[static_cast<std::size_t>(trial)] =
                run_trial(setup, stream, trial_seed, config.particle_threads);
            metrics[static_cast<std::size_t>(trial)] =
                trial_metrics(results[static_cast<std::size_t>(trial)], stream, changes);
        } catch (...) {
            failures[static_cast<std::size_t>(trial)] = std::current_exception();
        }
    });

    for (int trial = 0; trial < config.trials; ++trial) {
        if (!failures[static_cast<std::size_t>(trial)]) continue;
        try {
            std::rethrow_exception(failures[static_cast<std::size_t>(trial)]);
        } catch (const std::exception& e) {
            throw std::runtime_error("trial " + std::to_string(trial) + " failed: " + e.what());
        }
    }

    const MetricsReport report = aggregate_metrics(metrics);

    if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        for (int trial = 0; trial < config.trials; ++trial) {
            char name[32];
            std::snprintf(name, sizeof name, "trial_%03d", trial);
            write_trial_artifacts(config.output_dir + "/" + name,
                                  results[static_cast<std::size_t>(trial)]);
        }
        write_report_csv(config.output_dir + "/report.csv", method_name(config.method),
                         detect::threshold_value(config.policy), report);
    }
    return report;
}

std::vector<std::pair<double, MetricsReport>> run_sweep(const ExperimentConfig& config,
                                                        std::span<const double> thresholds) {
    std::vector<std::pair<double, MetricsReport>> out;
    for (double h : thresholds) {
        ExperimentConfig c = config;
        c.policy = ThresholdPolicy::fixed(h);
        c.output_dir.clear();  // per-threshold artifacts are not kept
        out.emplace_back(h, run_experiment(c));
    }
    if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        std::ofstream sweep(config.output_dir + "/sweep.csv", std::ios::binary);
        sweep << "threshold,pfa,pma,mean_alarms,add_joint\n";
        for (const auto& [h, r] : out) {
            double add_sum = 0.0;
            int add_n = 0;
            for (std::size_t c = 0; c < r.add.size(); ++c) {
                if (r.detected[c]) {
                    add_sum += r.add[c] * r.detected[c];
                    add_n += r.detected[c];
                }
            }
            sweep << csv::format_row({csv::format_double(h), csv::format_double(r.pfa),
                                      csv::format_double(r.pma),
                                      csv::format_double(r.mean_alarms),
                                      csv::format_double(add_n ? add_sum / add_n : kNaN)})
                  << "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// configuration file
// ---------------------------------------------------------------------------

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfigError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InvalidConfigError("config parse error: " + std::string(e.what()));
    }

    ExperimentConfig c;
    c.schema_version = j.value("schema_version", 1);
    if (c.schema_version != 1)
        throw InvalidConfigError("unsupported schema_version " +
                                 std::to_string(c.schema_version));
    c.method = method_from_name(j.value("method", "change_dynamic"));
    c.n_particles = j.value("n_particles", 2000);
    c.trials = j.value("trials", 30);
    c.seed = j.value("seed", std::uint64_t{1});
    c.threads = j.value("threads", 1);
    c.particle_threads = j.value("particle_threads", 1);
    c.printed_nu_bounds = j.value("printed_nu_bounds", false);
    c.printed_baseline_values = j.value("printed_baseline_values", false);

    if (j.contains("threshold")) {
        const auto& t = j["threshold"];
        const std::string kind = t.value("kind", "fixed");
        if (kind == "standard")
            c.policy = ThresholdPolicy::standard(t.value("alpha", 0.01));
        else if (kind == "conservative")
            c.policy = ThresholdPolicy::conservative(t.value("alpha", 0.01));
        else if (kind == "fixed")
            c.policy = ThresholdPolicy::fixed(t.value("h", 99.0));
        else
            throw InvalidConfigError("unknown threshold kind '" + kind + "'");
    }

    if (j.contains("generator")) {
        const auto& g = j["generator"];
        const std::string kind = g.value("kind", "mean_drift");
        if (kind == "mean_drift") {
            c.generator.kind = GeneratorSpec::Kind::mean_drift;
            auto& s = c.generator.mean_drift;
            s.horizon = g.value("horizon", s.horizon);
            s.mu0 = g.value("mu0", s.mu0);
            s.noise_sd = g.value("noise_sd", s.noise_sd);
            if (g.contains("segments")) {
                s.segments.clear();
                for (const auto& seg : g["segments"]) {
                    if (!seg.is_array() || seg.size() != 4)
                        throw InvalidConfigError("segment entries are [start,end,state,nu]");
                    s.segments.push_back({seg[0].get<std::int64_t>(), seg[1].get<std::int64_t>(),
                                          seg[2].get<int>(), seg[3].get<double>()});
                }
            }
        } else if (kind == "seizure_surrogate") {
            c.generator.kind = GeneratorSpec::Kind::seizure_surrogate;
            auto& s = c.generator.seizure;
            s.head = g.value("head", s.head);
            s.onset = g.value("onset", s.onset);
            s.plateau = g.value("plateau", s.plateau);
            s.termination = g.value("termination", s.termination);
            s.tail = g.value("tail", s.tail);
            s.alpha1 = g.value("alpha1", s.alpha1);
            s.alpha2 = g.value("alpha2", s.alpha2);
            s.log_sigma_lo = g.value("log_sigma_lo", s.log_sigma_lo);
            s.log_sigma_hi = g.value("log_sigma_hi", s.log_sigma_hi);
        } else if (kind == "csv") {
            c.generator.kind = GeneratorSpec::Kind::csv;
            c.generator.csv_path = g.value("path", "");
            c.generator.csv_column = g.value("column", "x");
            c.generator.csv_preset = g.value("preset", "mean_drift");
            if (c.generator.csv_path.empty())
                throw InvalidConfigError("csv generator requires a path");
        } else {
            throw InvalidConfigError("unknown generator kind '" + kind + "'");
        }
    }

    if (j.contains("output")) c.output_dir = j["output"].value("dir", "");
    return c;
}

}  // namespace changedyn::harness

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "changedyn/data.hpp"
#include "changedyn/harness.hpp"

namespace {

using changedyn::ThresholdPolicy;
namespace data = changedyn::data;
namespace harness = changedyn::harness;

void apply_overrides(harness::ExperimentConfig& cfg, const std::string& method,
                     int trials, int particles, double h, std::uint64_t seed, int threads,
                     const std::string& out_dir) {
    if (!method.empty()) cfg.method = harness::method_from_name(method);
    if (trials > 0) cfg.trials = trials;
    if (particles > 0) cfg.n_particles = particles;
    if (h > 0) cfg.policy = ThresholdPolicy::fixed(h);
    if (seed) cfg.seed = seed;
    if (threads > 0) cfg.threads = threads;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
}

void print_report(const std::string& method, double h, const harness::MetricsReport& r) {
    std::printf("method=%s h=%g trials=%d\n", method.c_str(), h, r.trials);
    std::printf("  rmsfe_x=%.5f rmsfe_mu=%.5f rmse_nu=%.6f\n", r.rmsfe_x, r.rmsfe_mu,
                r.rmse_nu);
    std::printf("  pfa=%.4f pma=%.4f mean_alarms=%.2f\n", r.pfa, r.pma, r.mean_alarms);
    for (std::size_t c = 0; c < r.add.size(); ++c)
        std::printf("  change %zu: detected in %d/%d trials, mean delay %.1f\n", c + 1,
                    r.detected[c], r.trials, r.add[c]);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online gradual-change detection engine"};
    app.require_subcommand(1);

    // simulate: emit a synthetic stream with ground truth columns
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic stream as CSV");
    std::string sim_kind = "mean_drift";
    std::string sim_out = "stream.csv";
    std::uint64_t sim_seed = 1;
    sim->add_option("--generator", sim_kind, "mean_drift or seizure_surrogate");
    sim->add_option("--out", sim_out, "Output CSV path");
    sim->add_option("--seed", sim_seed, "Generator seed");

    // detect: run one method over one stream
    auto* det = app.add_subcommand("detect", "Run one detector over a stream");
    std::string det_config;
    std::string det_input;
    std::string det_column = "x";
    std::string det_preset = "mean_drift";
    std::string det_method;
    std::string det_out;
    double det_h = 0;
    std::uint64_t det_seed = 0;
    int det_particles = 0;
    det->add_option("--config", det_config, "JSON experiment config");
    det->add_option("--input", det_input, "Input CSV (overrides the config generator)");
    det->add_option("--column", det_column, "Observation column name");
    det->add_option("--preset", det_preset, "Detector preset: mean_drift or seizure");
    det->add_option("--method", det_method, "change_dynamic, change_point, or bocd");
    det->add_option("--h", det_h, "Fixed declaration threshold");
    det->add_option("--seed", det_seed, "Run seed");
    det->add_option("--particles", det_particles, "Particle count");
    det->add_option("--out", det_out, "Artifact directory");

    // bench: multi-trial reproduction with aggregate report
    auto* ben = app.add_subcommand("bench", "Multi-trial benchmark with aggregate metrics");
    std::string ben_config;
    std::string ben_method;
    std::string ben_out;
    int ben_trials = 0;
    int ben_particles = 0;
    int ben_threads = 0;
    double ben_h = 0;
    std::uint64_t ben_seed = 0;
    ben->add_option("--config", ben_config, "JSON experiment config");
    ben->add_option("--method", ben_method, "change_dynamic, change_point, or bocd");
    ben->add_option("--trials", ben_trials, "Trial count");
    ben->add_option("--particles", ben_particles, "Particle count");
    ben->add_option("--threads", ben_threads, "Trial-level threads");
    ben->add_option("--h", ben_h, "Fixed declaration threshold");
    ben->add_option("--seed", ben_seed, "Run seed");
    ben->add_option("--out", ben_out, "Artifact directory");

    // sweep: one benchmark per threshold
    auto* swp = app.add_subcommand("sweep", "Benchmark across declaration thresholds");
    std::string swp_config;
    std::string swp_out;
    std::vector<double> swp_h{1, 19, 39, 99, 199};
    int swp_trials = 0;
    std::uint64_t swp_seed = 0;
    swp->add_option("--config", swp_config, "JSON experiment config");
    swp->add_option("--thresholds", swp_h, "Thresholds to sweep");
    swp->add_option("--trials", swp_trials, "Trial count");
    swp->add_option("--seed", swp_seed, "Run seed");
    swp->add_option("--out", swp_out, "Artifact directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            std::vector<data::StreamRecord> stream;
            if (sim_kind == "mean_drift") {
                stream = data::generate_mean_drift(data::SyntheticSpec::mean_drift_default(sim_seed));
            } else if (sim_kind == "seizure_surrogate") {
                data::SeizureSurrogateSpec spec;
                spec.seed = sim_seed;
                stream = data::generate_seizure_surrogate(spec);
            } else {
                std::fprintf(stderr, "unknown generator '%s'\n", sim_kind.c_str());
                return 2;
            }
            data::write_stream_csv(sim_out, stream);
            std::printf("wrote %zu records to %s\n", stream.size(), sim_out.c_str());
            return 0;
        }

        if (det->parsed()) {
            harness::ExperimentConfig cfg;
            if (!det_config.empty()) cfg = harness::load_config(det_config);
            if (!det_input.empty()) {
                cfg.generator.kind = harness::GeneratorSpec::Kind::csv;
                cfg.generator.csv_path = det_input;
                cfg.generator.csv_column = det_column;
                cfg.generator.csv_preset = det_preset;
            }
            cfg.trials = 1;
            apply_overrides(cfg, det_method, 0, det_particles, det_h, det_seed, 0, det_out);
            const auto report = harness::run_experiment(cfg);
            print_report(harness::method_name(cfg.method),
                         changedyn::detect::threshold_value(cfg.policy), report);
            return 0;
        }

        if (ben->parsed()) {
            harness::ExperimentConfig cfg;
            if (!ben_config.empty()) cfg = harness::load_config(ben_config);
            apply_overrides(cfg, ben_method, ben_trials, ben_particles, ben_h, ben_seed,
                            ben_threads, ben_out);
            const auto report = harness::run_experiment(cfg);
            print_report(harness::method_name(cfg.method),
                         changedyn::detect::threshold_value(cfg.policy), report);
            return 0;
        }

        if (swp->parsed()) {
            harness::ExperimentConfig cfg;
            if (!swp_config.empty()) cfg = harness::load_config(swp_config);
            apply_overrides(cfg, "", swp_trials, 0, 0, swp_seed, 0, swp_out);
            const auto rows = harness::run_sweep(cfg, swp_h);
            for (const auto& [h, r] : rows) print_report(harness::method_name(cfg.method), h, r);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

#include "changedyn/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "changedyn/errors.hpp"
#include "changedyn/parallel.hpp"

namespace changedyn::filter {

namespace {

enum Channel : std::uint64_t { kInit = 1, kPropose = 2, kResample = 3 };

// Non-throwing scoring for the data-parallel weight loop; a particle whose
// sigma underflowed gets -inf and dies in normalization.
double score(const Particle& p, std::span<const double> window, double x_next) {
    const double s = p.theta.sigma();
    if (!(s > 0.0)) return -std::numeric_limits<double>::infinity();
    double m = p.theta.mu;
    for (std::size_t i = 0; i < p.theta.alpha.size(); ++i) m += p.theta.alpha[i] * window[i];
    const double z = (x_next - m) / s;
    return -0.5 * z * z - p.theta.log_sigma;
}

}  // namespace

ParticleSet init(const ModelConfig& config, int n_particles,
                 std::span<const double> x0_window, std::uint64_t seed) {
    if (n_particles < 1) throw InvalidConfigError("n_particles must be at least 1");

    ParticleSet set;
    set.config = config;
    validate(set.config);

    if (static_cast<int>(x0_window.size()) != set.config.ar_order)
        throw InvalidConfigError("x0_window length must equal the AR order");
    for (double x : x0_window)
        if (!std::isfinite(x)) throw InvalidConfigError("x0_window must be finite");

    set.x_window.assign(x0_window.begin(), x0_window.end());
    set.seed = seed;
    set.particles.resize(static_cast<std::size_t>(n_particles));

    const double w = 1.0 / n_particles;
    const auto& bounds = set.config.states.bounds[static_cast<std::size_t>(set.config.initial_state)];
    for (int i = 0; i < n_particles; ++i) {
        Particle& p = set.particles[static_cast<std::size_t>(i)];
        p.theta = set.config.initial_theta;
        p.state = set.config.initial_state;
        p.runlength = 0;
        p.weight = w;
        if (set.config.initial_phi) {
            p.phi = *set.config.initial_phi;
        } else {
            RngStream rng = RngStream::derive(seed, kInit, static_cast<std::uint64_t>(i));
            p.phi = sample_phi_uniform(bounds, rng);
        }
    }
    return set;
}

void propose(ParticleSet& set) {
    const auto& cfg = set.config;
    const auto t_next = static_cast<std::uint64_t>(set.t + 1);
    parallel_for(set.size(), set.n_threads, [&](int i) {
        Particle& p = set.particles[static_cast<std::size_t>(i)];
        RngStream rng =
            RngStream::derive(set.seed, kPropose, t_next, static_cast<std::uint64_t>(i));
        const std::int64_t r = runlength_step(
            p.runlength, set.t, set.tau, cfg.states.hazard[static_cast<std::size_t>(p.state)], rng);
        if (r == 0) {
            auto [next_state, phi] = changepoint_proposal(p.state, cfg.states, rng);
            p.state = next_state;
            p.phi = std::move(phi);
            if (!cfg.post_change_theta.empty())
                p.theta = cfg.post_change_theta[static_cast<std::size_t>(next_state)];
        }
        p.runlength = r;
        change_dynamic_step_inplace(p.theta, p.phi, rng);
    });
}

void weight(ParticleSet& set, double x_next) {
    if (!std::isfinite(x_next)) throw InvalidInputError("weight: non-finite observation");
    const int n = set.size();
    auto& logw = set.scratch_logw;
    logw.resize(static_cast<std::size_t>(n));
    const std::span<const double> window(set.x_window);
    parallel_for(n, set.n_threads, [&](int i) {
        logw[static_cast<std::size_t>(i)] =
            score(set.particles[static_cast<std::size_t>(i)], window, x_next);
    });

    double max_lw = -std::numeric_limits<double>::infinity();
    for (double lw : logw) max_lw = std::max(max_lw, lw);
    if (!(max_lw > -std::numeric_limits<double>::infinity()))
        throw DegenerateLikelihoodError(set.t + 1);

    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = std::exp(logw[static_cast<std::size_t>(i)] - max_lw);
        set.particles[static_cast<std::size_t>(i)].weight = w;
        sum += w;
    }
    const double inv = 1.0 / sum;
    for (auto& p : set.particles) p.weight *= inv;
}

void resample(ParticleSet& set, double x_next) {
    const int n = set.size();
    auto& cdf = set.scratch_cdf;
    cdf.resize(static_cast<std::size_t>(n));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += set.particles[static_cast<std::size_t>(i)].weight;
        cdf[static_cast<std::size_t>(i)] = acc;
    }

    RngStream rng = RngStream::derive(set.seed, kResample, static_cast<std::uint64_t>(set.t + 1));
    auto& out = set.scratch_particles;
    out.resize(static_cast<std::size_t>(n));
    const double w = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        auto j = static_cast<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (j >= static_cast<std::size_t>(n)) j = static_cast<std::size_t>(n) - 1;
        out[static_cast<std::size_t>(i)] = set.particles[j];
        out[static_cast<std::size_t>(i)].weight = w;
    }
    set.particles.swap(out);

    if (!set.x_window.empty()) {
        for (std::size_t k = set.x_window.size(); k-- > 1;) set.x_window[k] = set.x_window[k - 1];
        set.x_window[0] = x_next;
    }
}

void step(ParticleSet& set, double x_next) {
    propose(set);
    weight(set, x_next);
    resample(set, x_next);
    set.t += 1;
}

}  // namespace changedyn::filter

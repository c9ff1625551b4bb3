#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "changedyn/rng.hpp"

namespace changedyn {

// Process-model parameters [alpha; mu; log(sigma)]. alpha[0] multiplies the
// most recent observation in the window, alpha[p-1] the oldest.
struct ThetaVector {
    std::vector<double> alpha;
    double mu = 0.0;
    double log_sigma = 0.0;

    int ar_order() const { return static_cast<int>(alpha.size()); }
    int dim() const { return ar_order() + 2; }
    double sigma() const;

    // Flattened component access in [alpha..., mu, log_sigma] order.
    double component(int i) const;
    void set_component(int i, double v);

    bool finite() const;
    bool operator==(const ThetaVector&) const = default;
};

// Change-dynamic parameters: per-component drift rate nu and diffusion scale
// gamma, one pair per theta component.
struct PhiVector {
    std::vector<double> nu;
    std::vector<double> gamma;

    int dim() const { return static_cast<int>(nu.size()); }
    bool operator==(const PhiVector&) const = default;
};

struct PhiBounds {
    PhiVector lo;
    PhiVector hi;
    bool operator==(const PhiBounds&) const = default;
};

// Per-state change-point rates, phi priors, and the embedded state transition
// matrix. State 0 is reserved for stationarity by convention.
struct StateSpec {
    std::vector<PhiBounds> bounds;
    std::vector<double> hazard;                   // each in (0, 1]
    std::vector<std::vector<double>> transition;  // row-stochastic

    int num_states() const { return static_cast<int>(hazard.size()); }
    bool operator==(const StateSpec&) const = default;
};

// Swaps any per-component interval whose endpoints are reversed.
void canonicalize(StateSpec& spec);

struct Particle {
    ThetaVector theta;  // current theta; the change-dynamic lag order is 1
    PhiVector phi;
    int state = 0;
    std::int64_t runlength = 0;
    double weight = 0.0;
    bool operator==(const Particle&) const = default;
};

struct ModelConfig {
    int ar_order = 0;
    int dynamic_lag = 1;  // only 1 is supported
    StateSpec states;
    int initial_state = 0;
    ThetaVector initial_theta;
    std::optional<PhiVector> initial_phi;  // absent: sampled from the initial state's bounds

    // Non-empty: theta jumps to the new state's fixed value at change-points.
    // This is how the piecewise-constant change-point baseline is expressed.
    std::vector<ThetaVector> post_change_theta;

    int dim() const { return ar_order + 2; }
    bool operator==(const ModelConfig&) const = default;
};

// Canonicalizes bounds in place and throws InvalidConfigError on any violated
// invariant (row sums, hazard range, dimensions, non-negative gamma).
void validate(ModelConfig& config);

double ar_step_mean(const ThetaVector& theta, std::span<const double> x_window);
double ar_step_log_density(const ThetaVector& theta, std::span<const double> x_window,
                           double x_next);
double ar_step_density(const ThetaVector& theta, std::span<const double> x_window,
                       double x_next);
double ar_step_sample(const ThetaVector& theta, std::span<const double> x_window,
                      RngStream& rng);

// Component-wise theta' = theta + nu + gamma * N(0,1).
ThetaVector change_dynamic_step(const ThetaVector& theta, const PhiVector& phi, RngStream& rng);
void change_dynamic_step_inplace(ThetaVector& theta, const PhiVector& phi, RngStream& rng);

// Regenerative runlength update. A particle whose runlength already reset
// since the last declaration (r < t - tau) increments deterministically;
// otherwise it resets to 0 with probability `hazard`.
std::int64_t runlength_step(std::int64_t r, std::int64_t t, std::int64_t tau, double hazard,
                            RngStream& rng);

// On a runlength reset: draw the post-change state from the transition row of
// the current state, then phi uniformly within the new state's bounds.
std::pair<int, PhiVector> changepoint_proposal(int state, const StateSpec& spec, RngStream& rng);

PhiVector sample_phi_uniform(const PhiBounds& bounds, RngStream& rng);

}  // namespace changedyn

#include "changedyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "changedyn/errors.hpp"

namespace changedyn {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112353;

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

double ThetaVector::sigma() const { return std::exp(log_sigma); }

double ThetaVector::component(int i) const {
    const int p = ar_order();
    if (i < p) return alpha[static_cast<std::size_t>(i)];
    return i == p ? mu : log_sigma;
}

void ThetaVector::set_component(int i, double v) {
    const int p = ar_order();
    if (i < p) {
        alpha[static_cast<std::size_t>(i)] = v;
    } else if (i == p) {
        mu = v;
    } else {
        log_sigma = v;
    }
}

bool ThetaVector::finite() const {
    return all_finite(alpha) && std::isfinite(mu) && std::isfinite(log_sigma);
}

void canonicalize(StateSpec& spec) {
    for (auto& b : spec.bounds) {
        const int m = std::min(b.lo.dim(), b.hi.dim());
        for (int i = 0; i < m; ++i) {
            if (b.lo.nu[i] > b.hi.nu[i]) std::swap(b.lo.nu[i], b.hi.nu[i]);
        }
        const auto g = std::min(b.lo.gamma.size(), b.hi.gamma.size());
        for (std::size_t i = 0; i < g; ++i) {
            if (b.lo.gamma[i] > b.hi.gamma[i]) std::swap(b.lo.gamma[i], b.hi.gamma[i]);
        }
    }
}

void validate(ModelConfig& config) {
    if (config.ar_order < 0) throw InvalidConfigError("ar_order must be non-negative");
    if (config.dynamic_lag != 1) throw InvalidConfigError("change-dynamic lag order must be 1");

    auto& st = config.states;
    const int k = st.num_states();
    const int m = config.dim();
    if (k < 1) throw InvalidConfigError("at least one state is required");
    if (static_cast<int>(st.bounds.size()) != k || static_cast<int>(st.transition.size()) != k)
        throw InvalidConfigError("bounds, hazard, and transition sizes disagree");

    canonicalize(st);
    for (int j = 0; j < k; ++j) {
        const auto& b = st.bounds[j];
        if (b.lo.dim() != m || b.hi.dim() != m ||
            static_cast<int>(b.lo.gamma.size()) != m || static_cast<int>(b.hi.gamma.size()) != m)
            throw InvalidConfigError("phi bounds must have dimension p + 2 per state");
        if (!all_finite(b.lo.nu) || !all_finite(b.hi.nu) || !all_finite(b.lo.gamma) ||
            !all_finite(b.hi.gamma))
            throw InvalidConfigError("phi bounds must be finite");
        for (int i = 0; i < m; ++i) {
            if (b.lo.gamma[i] < 0.0)
                throw InvalidConfigError("gamma bounds must be non-negative");
        }
        if (!(st.hazard[j] > 0.0) || st.hazard[j] > 1.0)
            throw InvalidConfigError("hazard must lie in (0, 1]");
        const auto& row = st.transition[j];
        if (static_cast<int>(row.size()) != k)
            throw InvalidConfigError("transition matrix must be square");
        double sum = 0.0;
        for (double p : row) {
            if (!(p >= 0.0)) throw InvalidConfigError("transition entries must be non-negative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw InvalidConfigError("transition row " + std::to_string(j) +
                                     " does not sum to 1");
    }

    if (config.initial_state < 0 || config.initial_state >= k)
        throw InvalidConfigError("initial_state out of range");
    if (config.initial_theta.ar_order() != config.ar_order || !config.initial_theta.finite())
        throw InvalidConfigError("initial_theta has wrong dimension or non-finite entries");
    if (config.initial_phi) {
        const auto& phi = *config.initial_phi;
        if (phi.dim() != m || static_cast<int>(phi.gamma.size()) != m)
            throw InvalidConfigError("initial_phi must have dimension p + 2");
        if (!all_finite(phi.nu) || !all_finite(phi.gamma))
            throw InvalidConfigError("initial_phi must be finite");
        for (double g : phi.gamma)
            if (g < 0.0) throw InvalidConfigError("initial_phi gamma must be non-negative");
    }
    if (!config.post_change_theta.empty()) {
        if (static_cast<int>(config.post_change_theta.size()) != k)
            throw InvalidConfigError("post_change_theta needs one value per state");
        for (const auto& th : config.post_change_theta)
            if (th.ar_order() != config.ar_order || !th.finite())
                throw InvalidConfigError("post_change_theta entries must match the AR order");
    }
}

double ar_step_mean(const ThetaVector& theta, std::span<const double> x_window) {
    double m = theta.mu;
    for (std::size_t i = 0; i < theta.alpha.size(); ++i) m += theta.alpha[i] * x_window[i];
    return m;
}

double ar_step_log_density(const ThetaVector& theta, std::span<const double> x_window,
                           double x_next) {
    if (static_cast<int>(x_window.size()) != theta.ar_order())
        throw InvalidInputError("x_window length must equal the AR order");
    if (!theta.finite() || !all_finite(x_window) || !std::isfinite(x_next))
        throw InvalidInputError("ar_step_density: non-finite input");
    const double s = theta.sigma();
    if (!(s > 0.0)) throw InvalidInputError("ar_step_density: sigma underflowed to zero");
    const double z = (x_next - ar_step_mean(theta, x_window)) / s;
    return -0.5 * z * z - theta.log_sigma - 0.5 * kLogTwoPi;
}

double ar_step_density(const ThetaVector& theta, std::span<const double> x_window,
                       double x_next) {
    return std::exp(ar_step_log_density(theta, x_window, x_next));
}

double ar_step_sample(const ThetaVector& theta, std::span<const double> x_window,
                      RngStream& rng) {
    if (static_cast<int>(x_window.size()) != theta.ar_order())
        throw InvalidInputError("x_window length must equal the AR order");
    if (!theta.finite() || !all_finite(x_window))
        throw InvalidInputError("ar_step_sample: non-finite input");
    return ar_step_mean(theta, x_window) + theta.sigma() * rng.normal();
}

void change_dynamic_step_inplace(ThetaVector& theta, const PhiVector& phi, RngStream& rng) {
    const int m = theta.dim();
    if (phi.dim() != m || static_cast<int>(phi.gamma.size()) != m)
        throw InvalidInputError("phi dimension must equal theta dimension");
    for (int i = 0; i < m; ++i) {
        const double g = phi.gamma[i];
        if (!(g >= 0.0)) throw InvalidInputError("gamma components must be non-negative");
        theta.set_component(i, theta.component(i) + phi.nu[i] + g * rng.normal());
    }
}

ThetaVector change_dynamic_step(const ThetaVector& theta, const PhiVector& phi,
                                RngStream& rng) {
    ThetaVector next = theta;
    change_dynamic_step_inplace(next, phi, rng);
    return next;
}

std::int64_t runlength_step(std::int64_t r, std::int64_t t, std::int64_t tau, double hazard,
                            RngStream& rng) {
    if (r < 0 || tau > t) throw InvalidInputError("runlength_step: need r >= 0 and tau <= t");
    if (!(hazard > 0.0) || hazard > 1.0)
        throw InvalidInputError("hazard must lie in (0, 1]");
    if (r < t - tau) return r + 1;  // one change-point per inter-declaration interval
    return rng.uniform() < hazard ? 0 : r + 1;
}

PhiVector sample_phi_uniform(const PhiBounds& bounds, RngStream& rng) {
    const int m = bounds.lo.dim();
    PhiVector phi;
    phi.nu.resize(static_cast<std::size_t>(m));
    phi.gamma.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) phi.nu[i] = rng.uniform(bounds.lo.nu[i], bounds.hi.nu[i]);
    for (int i = 0; i < m; ++i)
        phi.gamma[i] = rng.uniform(bounds.lo.gamma[i], bounds.hi.gamma[i]);
    return phi;
}

std::pair<int, PhiVector> changepoint_proposal(int state, const StateSpec& spec,
                                               RngStream& rng) {
    const auto& row = spec.transition.at(static_cast<std::size_t>(state));
    const int next = static_cast<int>(rng.categorical(row));
    return {next, sample_phi_uniform(spec.bounds.at(static_cast<std::size_t>(next)), rng)};
}

}  // namespace changedyn

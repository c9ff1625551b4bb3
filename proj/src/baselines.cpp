#include "changedyn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "changedyn/errors.hpp"

namespace changedyn {

ModelConfig to_model_config(const ChangePointBaselineConfig& config) {
    const int dim = config.ar_order + 2;
    const auto k = config.state_theta.size();

    ModelConfig m;
    m.ar_order = config.ar_order;
    m.states.hazard = config.hazard;
    m.states.transition = config.transition;
    m.states.bounds.resize(k);
    for (auto& b : m.states.bounds) {
        b.lo.nu.assign(static_cast<std::size_t>(dim), 0.0);
        b.lo.gamma.assign(static_cast<std::size_t>(dim), 0.0);
        b.hi = b.lo;
    }
    m.initial_state = config.initial_state;
    m.initial_theta = config.initial_theta;
    m.initial_phi = PhiVector{std::vector<double>(static_cast<std::size_t>(dim), 0.0),
                              std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
    m.post_change_theta = config.state_theta;
    return m;
}

std::optional<AlarmRecord> changepoint_baseline_step(ParticleSet& set, double x_next,
                                                     const ThresholdPolicy& policy) {
    return detect::step_and_detect(set, x_next, policy);
}

namespace bocd {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
const double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double student_t_log_pdf(double x, double df, double loc, double scale2) {
    const double z2 = (x - loc) * (x - loc) / scale2;
    return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
           0.5 * std::log(df * kPi * scale2) - 0.5 * (df + 1.0) * std::log1p(z2 / df);
}

double log_predictive(const Config& c, const Hypothesis& h, double x) {
    if (c.model == ObservationModel::normal_gamma) {
        const double scale2 = h.beta * (h.kappa + 1.0) / (h.alpha * h.kappa);
        return student_t_log_pdf(x, 2.0 * h.alpha, h.mu, scale2);
    }
    return student_t_log_pdf(x, 2.0 * h.alpha, 0.0, h.beta / h.alpha);
}

Hypothesis prior_hypothesis(const Config& c) {
    Hypothesis h;
    h.runlength = 0;
    h.log_prob = 0.0;
    h.mu = c.model == ObservationModel::normal_gamma ? c.mu0 : 0.0;
    h.kappa = c.kappa0;
    h.alpha = c.alpha0;
    h.beta = c.beta0;
    return h;
}

Hypothesis grown(const Config& c, const Hypothesis& h, double x) {
    Hypothesis n = h;
    n.runlength = h.runlength + 1;
    n.alpha = h.alpha + 0.5;
    if (c.model == ObservationModel::normal_gamma) {
        n.kappa = h.kappa + 1.0;
        n.mu = (h.kappa * h.mu + x) / n.kappa;
        n.beta = h.beta + h.kappa * (x - h.mu) * (x - h.mu) / (2.0 * n.kappa);
    } else {
        n.kappa = h.kappa + 1.0;
        n.beta = h.beta + 0.5 * x * x;
    }
    return n;
}

void normalize(std::vector<Hypothesis>& hs, std::int64_t t) {
    double mx = kNegInf;
    for (const auto& h : hs) mx = std::max(mx, h.log_prob);
    if (!(mx > kNegInf)) throw DegenerateLikelihoodError(t);
    double z = 0.0;
    for (const auto& h : hs) z += std::exp(h.log_prob - mx);
    const double log_z = mx + std::log(z);
    for (auto& h : hs) h.log_prob -= log_z;
}

}  // namespace

Config Config::normal_gamma_from_variance(double mu0, double mu_variance, double alpha0,
                                          double beta0, double hazard) {
    if (!(mu_variance > 0.0)) throw InvalidConfigError("mu_variance must be positive");
    Config c;
    c.model = ObservationModel::normal_gamma;
    c.mu0 = mu0;
    c.kappa0 = 1.0 / (mu_variance * (alpha0 / beta0));
    c.alpha0 = alpha0;
    c.beta0 = beta0;
    c.hazard = hazard;
    return c;
}

State init(const Config& config) {
    if (!(config.hazard > 0.0) || !(config.hazard < 1.0))
        throw InvalidConfigError("bocd hazard must lie in (0, 1)");
    if (!(config.alpha0 > 0.0) || !(config.beta0 > 0.0) || !(config.kappa0 > 0.0))
        throw InvalidConfigError("bocd prior parameters must be positive");
    if (config.prune_threshold < 0.0 || config.prune_threshold >= 1.0)
        throw InvalidConfigError("prune_threshold must lie in [0, 1)");
    State s;
    s.config = config;
    s.hypotheses = {prior_hypothesis(config)};
    return s;
}

void step(State& state, double x_next) {
    if (!std::isfinite(x_next)) throw InvalidInputError("bocd step: non-finite observation");
    const Config& c = state.config;
    const double log_h = std::log(c.hazard);
    const double log_1mh = std::log1p(-c.hazard);

    std::vector<Hypothesis> next;
    next.reserve(state.hypotheses.size() + 1);
    next.push_back(prior_hypothesis(c));
    next[0].log_prob = kNegInf;

    for (const auto& h : state.hypotheses) {
        const double joint = h.log_prob + log_predictive(c, h, x_next);
        next[0].log_prob = log_add(next[0].log_prob, joint + log_h);
        Hypothesis g = grown(c, h, x_next);
        g.log_prob = joint + log_1mh;
        next.push_back(std::move(g));
    }

    normalize(next, state.t + 1);
    if (c.prune_threshold > 0.0) {
        const double cut = std::log(c.prune_threshold);
        std::erase_if(next, [cut](const Hypothesis& h) { return h.log_prob < cut; });
        normalize(next, state.t + 1);
    }
    state.hypotheses.swap(next);
    state.t += 1;
}

std::pair<double, bool> change_ratio(const State& state, std::int64_t tau) {
    const std::int64_t horizon = state.t - tau;
    double num = kNegInf;
    double den = kNegInf;
    for (const auto& h : state.hypotheses) {
        if (h.runlength < horizon)
            num = log_add(num, h.log_prob);
        else
            den = log_add(den, h.log_prob);
    }
    if (den == kNegInf) return {std::numeric_limits<double>::infinity(), true};
    if (num == kNegInf) return {0.0, false};
    return {std::exp(num - den), false};
}

std::optional<AlarmRecord> detect_alarm(const State& state, const ThresholdPolicy& policy,
                                        std::int64_t tau) {
    const auto [z, denom_zero] = change_ratio(state, tau);
    if (!denom_zero && !(z > detect::threshold_value(policy))) return std::nullopt;
    AlarmRecord alarm;
    alarm.time = state.t;
    alarm.z = z;
    alarm.denom_zero = denom_zero;
    alarm.detected_state = AlarmRecord::kStateUnspecified;
    alarm.tau_after = state.t;
    return alarm;
}

double predictive_mean(const State& state) {
    if (state.config.model == ObservationModel::zero_mean) return 0.0;
    double m = 0.0;
    for (const auto& h : state.hypotheses) m += std::exp(h.log_prob) * h.mu;
    return m;
}

std::vector<double> runlength_posterior(const State& state) {
    std::vector<double> out(static_cast<std::size_t>(state.t) + 1, 0.0);
    for (const auto& h : state.hypotheses)
        out[static_cast<std::size_t>(h.runlength)] = std::exp(h.log_prob);
    return out;
}

}  // namespace bocd
}  // namespace changedyn

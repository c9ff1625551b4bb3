#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "changedyn/model.hpp"

namespace changedyn {

// Particle approximation of the model posterior at time t. tau is the last
// declaration time; it is written only by the detection layer's caller.
struct ParticleSet {
    ModelConfig config;
    std::vector<Particle> particles;
    std::int64_t t = 0;
    std::int64_t tau = 0;
    std::vector<double> x_window;  // most recent observation first, length = ar_order
    std::uint64_t seed = 0;

    // propose/weight parallelism; has no effect on results
    int n_threads = 1;

    int size() const { return static_cast<int>(particles.size()); }

    bool operator==(const ParticleSet& o) const {
        return particles == o.particles && t == o.t && tau == o.tau &&
               x_window == o.x_window && seed == o.seed && config == o.config;
    }

    // reused across steps
    std::vector<double> scratch_logw;
    std::vector<double> scratch_cdf;
    std::vector<Particle> scratch_particles;
};

namespace filter {

ParticleSet init(const ModelConfig& config, int n_particles,
                 std::span<const double> x0_window, std::uint64_t seed);

// Runlength update, change-point proposal where the runlength reset, then the
// change-dynamic step, per particle. The observation window is untouched.
void propose(ParticleSet& set);

// Scores every particle by its transition density for x_next and normalizes.
// Throws DegenerateLikelihoodError when every weight vanishes.
void weight(ParticleSet& set, double x_next);

// Multinomial draw of N replacement indices; resampled particles carry weight
// 1/N and the observation window advances to include x_next.
void resample(ParticleSet& set, double x_next);

// propose, weight, resample; advances t by one.
void step(ParticleSet& set, double x_next);

}  // namespace filter
}  // namespace changedyn

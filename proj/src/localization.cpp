#include "crosstrack/localization.hpp"

#include <algorithm>
#include <cmath>

#include "crosstrack/errors.hpp"

namespace crosstrack {

void propagate(std::vector<Particle>& particles, const InsReading& ins, double dt,
               const LocalizationParams& params, Rng& rng) {
    const MapPoint fwd = heading_forward(ins.heading);
    const MapPoint right = heading_right(ins.heading);
    const double step = dt * ins.speed;
    for (Particle& p : particles) {
        const double along = step + (params.sigma_along > 0.0 ? rng.normal(0.0, params.sigma_along) : 0.0);
        const double cross = params.sigma_cross > 0.0 ? rng.normal(0.0, params.sigma_cross) : 0.0;
        p.state.north += along * fwd.north + cross * right.north;
        p.state.east += along * fwd.east + cross * right.east;
    }
}

double weigh_lane(const Particle& p, const LaneObservation& obs, const DigitalMap& map,
                  const LocalizationParams& params) {
    const auto lane = containing_lane(map, p.state);
    if (!lane) return 0.0;  // off-road
    // map-implied distances from the particle to the lane's white lines
    const double implied_left = 0.5 * lane->width + lane->signed_right;
    const double implied_right = 0.5 * lane->width - lane->signed_right;
    const double r_left = implied_left - obs.dist_left;
    const double r_right = implied_right - obs.dist_right;
    return gaussian_kernel(r_left, params.sigma_lane) * gaussian_kernel(r_right, params.sigma_lane);
}

GnssWeight weigh_gnss(const Particle& p, const GnssReading& gnss, Heading theta,
                      const LocalizationParams& params) {
    const MapPoint residual = gnss.position - p.state;
    const MapPoint fwd = heading_forward(theta);
    const MapPoint right = heading_right(theta);
    const double lon = residual.north * fwd.north + residual.east * fwd.east;
    const double lat = residual.north * right.north + residual.east * right.east;
    return {gaussian_kernel(lat, params.sigma_gnss), gaussian_kernel(lon, params.sigma_gnss)};
}

double joint_weight(double w_gnss_lat, double w_lane, double w_gnss_lon, double gamma) {
    return (gamma * w_gnss_lat + (1.0 - gamma) * w_lane) * w_gnss_lon;
}

MapPoint estimate(const std::vector<Particle>& particles) {
    double total = 0.0;
    MapPoint mean;
    for (const Particle& p : particles) {
        total += p.weight;
        mean.north += p.weight * p.state.north;
        mean.east += p.weight * p.state.east;
    }
    if (!(total > 1e-300))
        throw DegenerateWeights("estimate: total particle weight underflowed");
    mean.north /= total;
    mean.east /= total;
    return mean;
}

std::vector<Particle> systematic_resample(const std::vector<Particle>& particles, double u0) {
    const size_t n = particles.size();
    std::vector<Particle> out;
    out.reserve(n);
    double total = 0.0;
    for (const Particle& p : particles) total += p.weight;
    const double uniform_w = 1.0 / static_cast<double>(n);
    size_t idx = 0;
    double cumulative = particles.empty() ? 0.0 : particles[0].weight / total;
    for (size_t k = 0; k < n; ++k) {
        const double pos = (u0 + static_cast<double>(k)) * uniform_w;
        while (pos > cumulative && idx + 1 < n) {
            ++idx;
            cumulative += particles[idx].weight / total;
        }
        Particle p = particles[idx];
        p.weight = uniform_w;
        out.push_back(p);
    }
    return out;
}

double effective_sample_size(const std::vector<Particle>& particles) {
    double total = 0.0, sq = 0.0;
    for (const Particle& p : particles) total += p.weight;
    if (total <= 0.0) return 0.0;
    for (const Particle& p : particles) {
        const double w = p.weight / total;
        sq += w * w;
    }
    return sq > 0.0 ? 1.0 / sq : 0.0;
}

ParticleFilter::ParticleFilter(const LocalizationParams& params, uint64_t seed)
    : params_(params), rng_(seed) {}

void ParticleFilter::initialize(const GnssReading& gnss) {
    particles_.clear();
    particles_.reserve(params_.n_particles);
    const double w = 1.0 / params_.n_particles;
    for (int i = 0; i < params_.n_particles; ++i) {
        Particle p;
        p.state.north = rng_.normal(gnss.position.north, params_.init_sigma);
        p.state.east = rng_.normal(gnss.position.east, params_.init_sigma);
        p.weight = w;
        particles_.push_back(p);
    }
    initialized_ = true;
}

MapPoint ParticleFilter::step(const InsReading& ins, const GnssReading& gnss,
                              const LaneObservation& lane_obs, Heading theta,
                              const DigitalMap& map, double dt) {
    if (!initialized_) initialize(gnss);

    propagate(particles_, ins, dt, params_, rng_);

    for (Particle& p : particles_) {
        const GnssWeight g = weigh_gnss(p, gnss, theta, params_);
        double w;
        if (lane_obs.valid) {
            const double w_lane = weigh_lane(p, lane_obs, map, params_);
            w = joint_weight(g.lateral, w_lane, g.longitudinal, params_.gamma);
        } else {
            // no lane observation: gamma is effectively 1 laterally
            w = g.lateral * g.longitudinal;
        }
        p.weight *= w;
    }

    MapPoint est;
    try {
        est = estimate(particles_);
    } catch (const DegenerateWeights&) {
        initialize(gnss);
        return gnss.position;
    }

    // normalize, then resample when the effective sample size collapses
    double total = 0.0;
    for (const Particle& p : particles_) total += p.weight;
    for (Particle& p : particles_) p.weight /= total;
    if (effective_sample_size(particles_) < 0.5 * particles_.size())
        particles_ = systematic_resample(particles_, rng_.uniform());
    return est;
}

}  // namespace crosstrack

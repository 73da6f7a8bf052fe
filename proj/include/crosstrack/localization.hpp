#pragma once

#include <vector>

#include "crosstrack/digital_map.hpp"
#include "crosstrack/geometry.hpp"
#include "crosstrack/random.hpp"

namespace crosstrack {

struct Particle {
    MapPoint state;
    double weight = 1.0;
};

struct InsReading {
    double speed = 0.0;   // m/s
    Heading heading;
    double timestamp = 0.0;
};

struct GnssReading {
    MapPoint position;
    double timestamp = 0.0;
};

struct LaneObservation {
    double dist_left = 0.0;   // meters to the left white line
    double dist_right = 0.0;  // meters to the right white line
    bool valid = false;
};

struct LocalizationParams {
    int n_particles = 500;
    double sigma_lane = 0.2;      // m
    double sigma_gnss = 3.0;      // m
    double gamma = 0.3;           // GNSS lateral credibility, [0,1]
    double sigma_along = 0.2;     // propagation noise along heading, m
    double sigma_cross = 0.1;     // propagation noise across heading, m
    double init_sigma = 5.0;      // spread of the initial cloud around GNSS, m
};

// Unnormalized Gaussian kernel exp(-r^2 / (2 sigma^2)).
inline double gaussian_kernel(double residual, double sigma) {
    const double z = residual / sigma;
    return std::exp(-0.5 * z * z);
}

void propagate(std::vector<Particle>& particles, const InsReading& ins, double dt,
               const LocalizationParams& params, Rng& rng);

// Product of the per-side kernels over the residual between the map-implied
// and observed white-line distances. Zero when the particle is outside every
// lane corridor.
double weigh_lane(const Particle& p, const LaneObservation& obs, const DigitalMap& map,
                  const LocalizationParams& params);

struct GnssWeight {
    double lateral = 1.0;
    double longitudinal = 1.0;
};

// GNSS residual decomposed across/along the heading, each scored separately.
GnssWeight weigh_gnss(const Particle& p, const GnssReading& gnss, Heading theta,
                      const LocalizationParams& params);

double joint_weight(double w_gnss_lat, double w_lane, double w_gnss_lon, double gamma);

// Weight-normalized mean; throws DegenerateWeights when the total underflows.
MapPoint estimate(const std::vector<Particle>& particles);

// Systematic resampling at stratified positions u0 + k/n over the CDF of the
// normalized weights. Output weights are uniform 1/n.
std::vector<Particle> systematic_resample(const std::vector<Particle>& particles, double u0);

double effective_sample_size(const std::vector<Particle>& particles);

// Full recursion owning particles and the rng. Each step propagates with the
// INS reading, reweighs against GNSS and (when valid) the lane observation,
// estimates, and resamples when the effective sample size drops below n/2.
// A degenerate weight total reinitializes the cloud from the GNSS fix.
class ParticleFilter {
public:
    ParticleFilter(const LocalizationParams& params, uint64_t seed);

    void initialize(const GnssReading& gnss);
    bool initialized() const { return initialized_; }

    MapPoint step(const InsReading& ins, const GnssReading& gnss, const LaneObservation& lane_obs,
                  Heading theta, const DigitalMap& map, double dt);

    const std::vector<Particle>& particles() const { return particles_; }
    std::vector<Particle>& particles() { return particles_; }

private:
    LocalizationParams params_;
    std::vector<Particle> particles_;
    Rng rng_;
    bool initialized_ = false;
};

}  // namespace crosstrack

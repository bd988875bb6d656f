#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hci/image.hpp"
#include "hci/segmentation.hpp"

namespace hci {

struct Particle {
    double x = 0.0;
    double y = 0.0;
    double weight = 0.0;
};

/// Normalized RGB color histogram, bins^3 cells. `samples` is the number of
/// pixels counted (0 marks an empty region).
struct ColorHistogram {
    int bins = 8;
    std::vector<double> density;
    std::int64_t samples = 0;
};

ColorHistogram color_histogram(const Frame& frame, int x, int y, int w, int h, int bins = 8);
double bhattacharyya(const ColorHistogram& a, const ColorHistogram& b);

struct TrackerParams {
    int particle_count = 100;
    double sigma_motion = 4.0;   // random-walk diffusion per axis
    double lambda = 20.0;        // likelihood sharpness
    int hist_bins = 8;
    std::optional<double> init_sigma;  // default: bbox diagonal / 8
};

struct ParticleSet {
    std::vector<Particle> particles;
    ColorHistogram reference;    // appearance of the initial hand bbox
    int bbox_w = 0, bbox_h = 0;  // carried from initialization
    TrackerParams params;
};

/// Particles Gaussian-scattered around the hand centroid with uniform weights
/// 1/n; the reference histogram comes from the hand bbox. Deterministic for a
/// fixed seed.
ParticleSet init_particles(const Component& hand, const Frame& frame, int n, std::uint64_t seed,
                           const TrackerParams& params = {});

/// One predict/weight/normalize/estimate/resample cycle:
///   likelihood = exp(-lambda * (1 - bhattacharyya(reference, local histogram)))
/// with zero likelihood for particles whose box misses the frame entirely.
/// Systematic resampling runs when the effective sample size drops below n/2.
/// Returns the weighted-mean estimate, or nullopt when every likelihood is
/// zero (target lost; the set is no longer usable).
std::optional<std::pair<double, double>> step(ParticleSet& ps, const Frame& frame, std::uint64_t seed);

/// Euclidean distance between the face center (x2, y2) and hand center (x1, y1).
double center_distance(double x2, double y2, double x1, double y1);

struct TriggerConfig {
    double threshold = 0.0;  // pixels, must be > 0
};

enum class Trigger { Proceed, Stay };

/// Proceed iff d <= threshold (inclusive).
Trigger check_trigger(double d, const TriggerConfig& cfg);

}  // namespace hci

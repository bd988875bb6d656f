#include "hci/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hci/rng.hpp"

namespace hci {

ColorHistogram color_histogram(const Frame& frame, int x, int y, int w, int h, int bins) {
    if (bins < 1 || bins > 256) throw std::invalid_argument("color_histogram: bins must be in [1,256]");
    ColorHistogram hist;
    hist.bins = bins;
    hist.density.assign(std::size_t(bins) * bins * bins, 0.0);
    const int x0 = std::max(0, x), y0 = std::max(0, y);
    const int x1 = std::min(frame.width, x + w), y1 = std::min(frame.height, y + h);
    for (int py = y0; py < y1; ++py) {
        for (int px = x0; px < x1; ++px) {
            const Rgb c = frame.at(px, py);
            const int bi = (c.r * bins) / 256, bj = (c.g * bins) / 256, bk = (c.b * bins) / 256;
            hist.density[(std::size_t(bi) * bins + bj) * bins + bk] += 1.0;
            ++hist.samples;
        }
    }
    if (hist.samples > 0)
        for (double& d : hist.density) d /= static_cast<double>(hist.samples);
    return hist;
}

double bhattacharyya(const ColorHistogram& a, const ColorHistogram& b) {
    if (a.density.size() != b.density.size()) throw std::invalid_argument("bhattacharyya: bin count mismatch");
    double bc = 0.0;
    for (std::size_t i = 0; i < a.density.size(); ++i) bc += std::sqrt(a.density[i] * b.density[i]);
    return bc;
}

ParticleSet init_particles(const Component& hand, const Frame& frame, int n, std::uint64_t seed,
                           const TrackerParams& params) {
    if (n < 1) throw std::invalid_argument("init_particles: n must be >= 1");
    ParticleSet ps;
    ps.params = params;
    ps.params.particle_count = n;
    ps.bbox_w = std::max(1, hand.w);
    ps.bbox_h = std::max(1, hand.h);
    ps.reference = color_histogram(frame, hand.x, hand.y, hand.w, hand.h, params.hist_bins);

    const double diag = std::sqrt(double(ps.bbox_w) * ps.bbox_w + double(ps.bbox_h) * ps.bbox_h);
    const double sigma = params.init_sigma.value_or(diag / 8.0);
    Rng rng(seed);
    ps.particles.resize(static_cast<std::size_t>(n));
    for (Particle& p : ps.particles) {
        p.x = hand.cx + rng.normal(0.0, sigma);
        p.y = hand.cy + rng.normal(0.0, sigma);
        p.weight = 1.0 / n;
    }
    return ps;
}

namespace {

void systematic_resample(std::vector<Particle>& particles, Rng& rng) {
    const std::size_t n = particles.size();
    std::vector<double> cumulative(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += particles[i].weight;
        cumulative[i] = acc;
    }
    std::vector<Particle> next;
    next.reserve(n);
    const double u0 = rng.uniform01() / static_cast<double>(n);
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double u = u0 + static_cast<double>(k) / static_cast<double>(n);
        while (j + 1 < n && cumulative[j] < u) ++j;
        Particle p = particles[j];
        p.weight = 1.0 / static_cast<double>(n);
        next.push_back(p);
    }
    particles = std::move(next);
}

}  // namespace

std::optional<std::pair<double, double>> step(ParticleSet& ps, const Frame& frame, std::uint64_t seed) {
    if (ps.particles.empty()) throw std::invalid_argument("step: particle set not initialized");
    Rng rng(seed);
    const TrackerParams& prm = ps.params;

    // predict
    for (Particle& p : ps.particles) {
        p.x += rng.normal(0.0, prm.sigma_motion);
        p.y += rng.normal(0.0, prm.sigma_motion);
    }

    // weight by appearance likelihood
    double sum = 0.0;
    for (Particle& p : ps.particles) {
        const int rx = static_cast<int>(std::lround(p.x - ps.bbox_w / 2.0));
        const int ry = static_cast<int>(std::lround(p.y - ps.bbox_h / 2.0));
        const ColorHistogram local = color_histogram(frame, rx, ry, ps.bbox_w, ps.bbox_h, prm.hist_bins);
        double likelihood = 0.0;
        if (local.samples > 0)
            likelihood = std::exp(-prm.lambda * (1.0 - bhattacharyya(ps.reference, local)));
        p.weight *= likelihood;
        sum += p.weight;
    }
    if (sum <= 0.0) return std::nullopt;  // target lost

    double ess_denom = 0.0, ex = 0.0, ey = 0.0;
    for (Particle& p : ps.particles) {
        p.weight /= sum;
        ess_denom += p.weight * p.weight;
        ex += p.weight * p.x;
        ey += p.weight * p.y;
    }

    const double ess = 1.0 / ess_denom;
    if (ess < ps.particles.size() / 2.0) systematic_resample(ps.particles, rng);
    return std::make_pair(ex, ey);
}

double center_distance(double x2, double y2, double x1, double y1) {
    const double dx = x2 - x1, dy = y2 - y1;
    return std::sqrt(dx * dx + dy * dy);
}

Trigger check_trigger(double d, const TriggerConfig& cfg) {
    if (cfg.threshold <= 0.0) throw std::invalid_argument("check_trigger: threshold must be > 0");
    if (d < 0.0) throw std::invalid_argument("check_trigger: distance must be >= 0");
    return d <= cfg.threshold ? Trigger::Proceed : Trigger::Stay;
}

}  // namespace hci

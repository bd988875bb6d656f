#include "hci/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hci {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::runtime_error("config: bad integer for " + key + ": '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::runtime_error("config: bad number for " + key + ": '" + v + "'");
    }
}

std::uint8_t to_u8(const std::string& key, const std::string& v) {
    const int x = to_int(key, v);
    if (x < 0 || x > 255) throw std::runtime_error("config: value out of [0,255] for " + key);
    return static_cast<std::uint8_t>(x);
}

}  // namespace

void apply_config_line(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "skin.cb_lo") cfg.skin.cb_lo = to_u8(key, value);
    else if (key == "skin.cb_hi") cfg.skin.cb_hi = to_u8(key, value);
    else if (key == "skin.cr_lo") cfg.skin.cr_lo = to_u8(key, value);
    else if (key == "skin.cr_hi") cfg.skin.cr_hi = to_u8(key, value);
    else if (key == "skin.y_min") cfg.skin.y_min = to_u8(key, value);
    else if (key == "morph.erode_radius") cfg.erode_radius = to_int(key, value);
    else if (key == "morph.dilate_radius") cfg.dilate_radius = to_int(key, value);
    else if (key == "segment.min_area_frac") cfg.min_area_frac = to_double(key, value);
    else if (key == "track.particles") cfg.tracker.particle_count = to_int(key, value);
    else if (key == "track.sigma_motion") cfg.tracker.sigma_motion = to_double(key, value);
    else if (key == "track.lambda") cfg.tracker.lambda = to_double(key, value);
    else if (key == "track.hist_bins") cfg.tracker.hist_bins = to_int(key, value);
    else if (key == "trigger.multiplier") cfg.trigger_multiplier = to_double(key, value);
    else if (key == "pipeline.face_miss_max") cfg.face_miss_max = to_int(key, value);
    else if (key == "pipeline.cooldown") cfg.cooldown_frames = to_int(key, value);
    else if (key == "pipeline.vote") cfg.vote_frames = to_int(key, value);
    else if (key == "models.cascade") cfg.cascade_path = value;
    else if (key == "models.moe") cfg.moe_path = value;
    else if (key == "models.pca") cfg.pca_path = value;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else throw std::runtime_error("config: unknown key '" + key + "'");
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    PipelineConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config " + path + ":" + std::to_string(line_no) + ": expected key=value");
        apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::string config_to_text(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "skin.cb_lo=" << int(cfg.skin.cb_lo) << "\n";
    out << "skin.cb_hi=" << int(cfg.skin.cb_hi) << "\n";
    out << "skin.cr_lo=" << int(cfg.skin.cr_lo) << "\n";
    out << "skin.cr_hi=" << int(cfg.skin.cr_hi) << "\n";
    out << "skin.y_min=" << int(cfg.skin.y_min) << "\n";
    out << "morph.erode_radius=" << cfg.erode_radius << "\n";
    out << "morph.dilate_radius=" << cfg.dilate_radius << "\n";
    out << "segment.min_area_frac=" << cfg.min_area_frac << "\n";
    out << "track.particles=" << cfg.tracker.particle_count << "\n";
    out << "track.sigma_motion=" << cfg.tracker.sigma_motion << "\n";
    out << "track.lambda=" << cfg.tracker.lambda << "\n";
    out << "track.hist_bins=" << cfg.tracker.hist_bins << "\n";
    out << "trigger.multiplier=" << cfg.trigger_multiplier << "\n";
    out << "pipeline.face_miss_max=" << cfg.face_miss_max << "\n";
    out << "pipeline.cooldown=" << cfg.cooldown_frames << "\n";
    out << "pipeline.vote=" << cfg.vote_frames << "\n";
    if (!cfg.cascade_path.empty()) out << "models.cascade=" << cfg.cascade_path << "\n";
    if (!cfg.moe_path.empty()) out << "models.moe=" << cfg.moe_path << "\n";
    if (!cfg.pca_path.empty()) out << "models.pca=" << cfg.pca_path << "\n";
    out << "seed=" << cfg.seed << "\n";
    return out.str();
}

}  // namespace hci

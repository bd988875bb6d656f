#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "hci/segmentation.hpp"
#include "hci/tracking.hpp"

namespace hci {

/// Pipeline configuration, loadable from a flat key=value text file
/// ('#' starts a comment; unknown keys are rejected). Defaults match the
/// values documented in the README.
struct PipelineConfig {
    SkinRule skin;
    int erode_radius = 2;
    int dilate_radius = 4;
    double min_area_frac = 0.005;  // of frame pixels

    TrackerParams tracker;
    double trigger_multiplier = 1.5;  // threshold = multiplier * face bbox width
    int face_miss_max = 5;            // frames a stale face position may persist
    int cooldown_frames = 15;
    int vote_frames = 3;              // consecutive classifications before emitting

    std::string cascade_path;
    std::string moe_path;
    std::string pca_path;

    std::uint64_t seed = 1;
};

PipelineConfig load_config(const std::string& path);
void apply_config_line(PipelineConfig& cfg, const std::string& key, const std::string& value);
std::string config_to_text(const PipelineConfig& cfg);

}  // namespace hci

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace vqloc {

/// Run configuration shared by every stage. Field names match the JSON config keys.
struct EngineConfig {
    double fps = 5.0;
    int k = 10;
    double t_sim = 0.7;
    double t_nms = 0.8;
    double t_q = 0.5;
    double area_min_fraction = 0.0007;
    double blur_var_min = 100.0;
    double zoom_cap = 2.5;
    double crop_target_occupancy = 0.5;
    // Accept a reiterated track when new.score >= update_ratio * previous.score.
    // Infinity disables updates.
    double update_ratio = 0.9;

    // builtin greedy tracker
    double w_sim = 0.5;
    double w_iou = 0.5;
    double stop_threshold = 0.6;

    bool refine = true;
    bool reiterate = true;
    // Measure blur on the object-centric crop; false measures the whole frame.
    bool blur_on_crop = true;
    // 0 = hardware concurrency.
    int threads = 0;
};

/// Throws InputError naming the first violated constraint.
void validate(const EngineConfig& config);

/// Unknown keys are rejected; missing keys keep their defaults.
EngineConfig config_from_json(std::string_view text);
std::string config_to_json(const EngineConfig& config);
EngineConfig load_config(const std::filesystem::path& path);

}  // namespace vqloc

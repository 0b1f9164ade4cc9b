#include "vqloc/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vqloc/error.hpp"

namespace vqloc {
namespace {

using json = nlohmann::ordered_json;

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("config field '") + key + "': " + e.what());
    }
}

// update_ratio may be "inf" (never update) since JSON has no infinity literal.
void read_ratio(const json& j, double& out) {
    if (!j.contains("update_ratio")) return;
    const auto& v = j.at("update_ratio");
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
        out = std::numeric_limits<double>::infinity();
        return;
    }
    read_field(j, "update_ratio", out);
}

}  // namespace

void validate(const EngineConfig& c) {
    auto fail = [](const std::string& m) { throw InputError("invalid config: " + m); };
    if (!(c.fps > 0.0)) fail("fps must be positive");
    if (c.k < 1) fail("k must be >= 1");
    if (!(c.t_nms > 0.0 && c.t_nms < 1.0)) fail("t_nms must lie in (0, 1)");
    if (!(c.t_sim >= -1.0 && c.t_sim <= 1.0)) fail("t_sim must lie in [-1, 1]");
    if (!(c.t_q >= -1.0 && c.t_q <= 1.0)) fail("t_q must lie in [-1, 1]");
    if (!(c.zoom_cap >= 1.0)) fail("zoom_cap must be >= 1");
    if (!(c.crop_target_occupancy > 0.0 && c.crop_target_occupancy <= 1.0))
        fail("crop_target_occupancy must lie in (0, 1]");
    if (!(c.area_min_fraction >= 0.0)) fail("area_min_fraction must be >= 0");
    if (!(c.blur_var_min >= 0.0)) fail("blur_var_min must be >= 0");
    if (!(c.update_ratio >= 0.0)) fail("update_ratio must be >= 0");
    if (!(c.w_sim >= 0.0 && c.w_iou >= 0.0)) fail("tracker weights must be >= 0");
    if (c.threads < 0) fail("threads must be >= 0");
}

EngineConfig config_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InputError("config must be a JSON object");
    static const char* const known[] = {"fps",   "k",          "t_sim",      "t_nms",        "t_q",
                                        "area_min_fraction",   "blur_var_min", "zoom_cap",
                                        "crop_target_occupancy", "update_ratio", "w_sim",
                                        "w_iou", "stop_threshold", "refine",     "reiterate",
                                        "blur_on_crop",         "threads"};
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw InputError("unknown config field '" + key + "'");
    }
    EngineConfig c;
    read_field(j, "fps", c.fps);
    read_field(j, "k", c.k);
    read_field(j, "t_sim", c.t_sim);
    read_field(j, "t_nms", c.t_nms);
    read_field(j, "t_q", c.t_q);
    read_field(j, "area_min_fraction", c.area_min_fraction);
    read_field(j, "blur_var_min", c.blur_var_min);
    read_field(j, "zoom_cap", c.zoom_cap);
    read_field(j, "crop_target_occupancy", c.crop_target_occupancy);
    read_ratio(j, c.update_ratio);
    read_field(j, "w_sim", c.w_sim);
    read_field(j, "w_iou", c.w_iou);
    read_field(j, "stop_threshold", c.stop_threshold);
    read_field(j, "refine", c.refine);
    read_field(j, "reiterate", c.reiterate);
    read_field(j, "blur_on_crop", c.blur_on_crop);
    read_field(j, "threads", c.threads);
    validate(c);
    return c;
}

std::string config_to_json(const EngineConfig& c) {
    json j;
    j["fps"] = c.fps;
    j["k"] = c.k;
    j["t_sim"] = c.t_sim;
    j["t_nms"] = c.t_nms;
    j["t_q"] = c.t_q;
    j["area_min_fraction"] = c.area_min_fraction;
    j["blur_var_min"] = c.blur_var_min;
    j["zoom_cap"] = c.zoom_cap;
    j["crop_target_occupancy"] = c.crop_target_occupancy;
    if (std::isinf(c.update_ratio))
        j["update_ratio"] = "inf";
    else
        j["update_ratio"] = c.update_ratio;
    j["w_sim"] = c.w_sim;
    j["w_iou"] = c.w_iou;
    j["stop_threshold"] = c.stop_threshold;
    j["refine"] = c.refine;
    j["reiterate"] = c.reiterate;
    j["blur_on_crop"] = c.blur_on_crop;
    j["threads"] = c.threads;
    return j.dump(2);
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

}  // namespace vqloc

#include "cli_common.hpp"

#include <cmath>

#include "vqloc/bridge.hpp"
#include "vqloc/error.hpp"
#include "vqloc/fs_util.hpp"
#include "vqloc/synthetic.hpp"

namespace vqloc::cli {
namespace fs = std::filesystem;

namespace {

struct NumberField {
    const char* name;
    double EngineConfig::*real;
    int EngineConfig::*integer;
};

const NumberField kNumberFields[] = {
    {"fps", &EngineConfig::fps, nullptr},
    {"k", nullptr, &EngineConfig::k},
    {"t_sim", &EngineConfig::t_sim, nullptr},
    {"t_nms", &EngineConfig::t_nms, nullptr},
    {"t_q", &EngineConfig::t_q, nullptr},
    {"area_min_fraction", &EngineConfig::area_min_fraction, nullptr},
    {"blur_var_min", &EngineConfig::blur_var_min, nullptr},
    {"zoom_cap", &EngineConfig::zoom_cap, nullptr},
    {"crop_target_occupancy", &EngineConfig::crop_target_occupancy, nullptr},
    {"update_ratio", &EngineConfig::update_ratio, nullptr},
    {"w_sim", &EngineConfig::w_sim, nullptr},
    {"w_iou", &EngineConfig::w_iou, nullptr},
    {"stop_threshold", &EngineConfig::stop_threshold, nullptr},
    {"threads", nullptr, &EngineConfig::threads},
};

struct SwitchField {
    const char* name;
    bool EngineConfig::*member;
};

const SwitchField kSwitchFields[] = {
    {"refine", &EngineConfig::refine},
    {"reiterate", &EngineConfig::reiterate},
    {"blur_on_crop", &EngineConfig::blur_on_crop},
};

}  // namespace

void ConfigOptions::attach(CLI::App& app) {
    app.add_option("--config", config_path_, "JSON file with EngineConfig fields")->check(CLI::ExistingFile);
    for (const auto& f : kNumberFields)
        app.add_option(std::string("--") + f.name, numbers_[f.name], std::string("override config field ") + f.name)
            ->group("Config overrides");
    for (const auto& f : kSwitchFields)
        app.add_option(std::string("--") + f.name, switches_[f.name], std::string("override config field ") + f.name)
            ->group("Config overrides");
    app.add_flag("--no-refine", no_refine_, "skip the refinement stage");
    app.add_flag("--no-reiterate", no_reiterate_, "skip query expansion and reiteration");
}

EngineConfig ConfigOptions::resolve() const {
    EngineConfig c = config_path_.empty() ? EngineConfig{} : load_config(config_path_);
    for (const auto& f : kNumberFields) {
        const auto& v = numbers_.at(f.name);
        if (!v) continue;
        if (f.real) c.*f.real = *v;
        else if (*v != std::trunc(*v) || std::abs(*v) > 1e9)
            throw InputError(std::string("--") + f.name + " must be an integer");
        else c.*f.integer = static_cast<int>(*v);
    }
    for (const auto& f : kSwitchFields)
        if (const auto& v = switches_.at(f.name)) c.*f.member = *v;
    if (no_refine_) c.refine = false;
    if (no_reiterate_) c.reiterate = false;
    validate(c);
    return c;
}

int stride_from_extractor_id(const std::string& id) {
    const std::string prefix = "synthetic-extractor/s";
    if (id.rfind(prefix, 0) != 0) return 0;
    try {
        return std::stoi(id.substr(prefix.size()));
    } catch (const std::exception&) {
        return 0;
    }
}

void require_directory(const fs::path& dir, const std::string& what) {
    if (!fs::is_directory(dir)) throw InputError(what + " " + dir.string() + " does not exist");
}

StoreSession open_store(const fs::path& dir) {
    require_directory(dir, "token store");
    StoreSession s;
    s.dir = dir;
    auto artifacts = bridge_read(dir);
    s.tokens = artifacts.tokens;
    s.backends = artifacts.backends;
    const VideoInfo& info = s.tokens->info();
    const int stride = stride_from_extractor_id(info.extractor_id);
    if (info.segmenter_id == "synthetic-segmenter" && stride > 0 && !info.source_dir.empty()) {
        const fs::path scenario_file = dir / info.source_dir / "scenario.json";
        if (fs::exists(scenario_file)) {
            auto world = std::make_shared<const SyntheticWorld>(scenario_from_json(read_file(scenario_file)));
            if (world->info().video_id != info.video_id)
                throw FormatError(scenario_file.string() + " describes " + world->info().video_id + ", store holds " +
                                  info.video_id);
            auto live = make_synthetic_backends(world, stride);
            live.tracker = s.backends.tracker;
            s.backends = live;
        }
    }
    return s;
}

}  // namespace vqloc::cli

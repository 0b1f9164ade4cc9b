#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vqloc/backends.hpp"
#include "vqloc/config.hpp"
#include "vqloc/token_set.hpp"

namespace vqloc::cli {

/// Command-line overrides for every EngineConfig field, applied over the config file.
class ConfigOptions {
public:
    void attach(CLI::App& app);
    EngineConfig resolve() const;

private:
    std::string config_path_;
    std::map<std::string, std::optional<double>> numbers_;
    std::map<std::string, std::optional<bool>> switches_;
    bool no_refine_ = false;
    bool no_reiterate_ = false;
};

/// A token store plus the backends that can serve its video.
struct StoreSession {
    std::filesystem::path dir;
    std::shared_ptr<const VideoTokenSet> tokens;
    Backends backends;
};

/// Stores built from a synthetic video get live synthetic backends again; any other store
/// is served from its recorded artifacts.
StoreSession open_store(const std::filesystem::path& dir);

int stride_from_extractor_id(const std::string& id);

void require_directory(const std::filesystem::path& dir, const std::string& what);

}  // namespace vqloc::cli

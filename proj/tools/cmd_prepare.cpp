#include <iostream>
#include <memory>

#include "cli_common.hpp"
#include "commands.hpp"
#include "vqloc/bridge.hpp"
#include "vqloc/error.hpp"
#include "vqloc/fs_util.hpp"
#include "vqloc/synthetic.hpp"
#include "vqloc/token_store.hpp"
#include "vqloc/tokenizer.hpp"

namespace vqloc::cli {
namespace fs = std::filesystem;

namespace {

struct PrepareOptions {
    std::string video_dir;
    std::string backend = "synthetic";
    std::string out;
    bool force = false;
    ConfigOptions config;
};

std::string relative_source(const fs::path& store, const fs::path& video) {
    const fs::path parent = fs::absolute(store).lexically_normal().parent_path();
    return fs::absolute(video).lexically_normal().lexically_relative(parent).generic_string().insert(0, "../");
}

void run(const PrepareOptions& o) {
    const EngineConfig config = o.config.resolve();
    const fs::path video = o.video_dir;
    const fs::path out = o.out;
    require_directory(video, "video directory");
    if (fs::exists(out) && !o.force) throw InputError("token store " + out.string() + " already exists (use --force)");

    if (o.backend == "synthetic") {
        const fs::path scenario_file = video / "scenario.json";
        if (!fs::exists(scenario_file))
            throw InputError("synthetic backend needs " + scenario_file.string());
        auto world = std::make_shared<const SyntheticWorld>(scenario_from_json(read_file(scenario_file)));
        const auto backends = make_synthetic_backends(world);
        VideoInfo info = world->info();
        info.source_dir = relative_source(out, video);
        const auto tokens = build_token_set(info, *backends.segmenter, *backends.extractor, config.threads);
        save_token_store(tokens, out, o.force);
        std::cout << "prepared " << info.video_id << ": " << tokens.frame_count() << " frames, " << tokens.size()
                  << " tokens, d=" << tokens.dim() << "\n";
        return;
    }
    const std::string prefix = "bridge:";
    if (o.backend.rfind(prefix, 0) != 0)
        throw InputError("unknown backend '" + o.backend + "' (expected synthetic or bridge:PATH)");
    const fs::path bridge_dir = o.backend.substr(prefix.size());
    require_directory(bridge_dir, "bridge store");
    const auto problems = check_token_store(bridge_dir);
    if (!problems.empty()) {
        std::string msg = "bridge store " + bridge_dir.string() + " is invalid:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw FormatError(msg);
    }
    const auto artifacts = bridge_read(bridge_dir);
    VideoInfo info = artifacts.tokens->info();
    info.source_dir = relative_source(out, video);
    std::vector<RegionRecord> records = artifacts.tokens->records();
    VideoTokenSet tokens(info, std::move(records), artifacts.tokens->embeddings());
    save_token_store(tokens, out, o.force);
    if (fs::is_directory(bridge_dir / "features"))
        fs::copy(bridge_dir / "features", out / "features", fs::copy_options::recursive);
    if (fs::exists(bridge_dir / "tracks.jsonl")) fs::copy_file(bridge_dir / "tracks.jsonl", out / "tracks.jsonl");
    std::cout << "prepared " << info.video_id << ": " << tokens.frame_count() << " frames, " << tokens.size()
              << " tokens, d=" << tokens.dim() << "\n";
}

}  // namespace

void add_prepare(CLI::App& app) {
    auto o = std::make_shared<PrepareOptions>();
    auto* sub = app.add_subcommand("prepare", "tokenize a video into a token store");
    sub->add_option("--video-dir", o->video_dir, "directory with the sampled frames")->required();
    sub->add_option("--backend", o->backend, "synthetic or bridge:PATH");
    sub->add_option("--out", o->out, "token store directory to create")->required();
    sub->add_flag("--force", o->force, "replace an existing store");
    o->config.attach(*sub);
    sub->callback([o] { run(*o); });
}

}  // namespace vqloc::cli

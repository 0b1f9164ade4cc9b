#include <cstdio>
#include <iostream>
#include <map>
#include <memory>

#include "cli_common.hpp"
#include "commands.hpp"
#include "vqloc/error.hpp"
#include "vqloc/fs_util.hpp"
#include "vqloc/image.hpp"
#include "vqloc/localize.hpp"
#include "vqloc/metrics.hpp"

namespace vqloc::cli {
namespace fs = std::filesystem;

namespace {

struct LocalizeOptions {
    std::vector<std::string> stores;
    std::string annotations;
    std::string out;
    std::string overlays;
    bool verbose = false;
    ConfigOptions config;
};

void dump_overlays(const fs::path& dir, const std::string& query_id, const ResponseTrack& track,
                   const StoreSession& session) {
    if (!session.backends.frames) {
        std::cerr << "warning: no frame images for " << session.tokens->info().video_id << "; overlays skipped\n";
        return;
    }
    const VideoInfo& info = session.tokens->info();
    const fs::path qdir = dir / query_id;
    fs::create_directories(qdir);
    for (const auto& fb : track.boxes) {
        Image img = session.backends.frames->render(FrameView::full(fb.frame, info.width, info.height));
        draw_box(img, fb.box, {0, 255, 0}, 3);
        char name[40];
        std::snprintf(name, sizeof(name), "frame_%06d.png", fb.frame);
        write_png(qdir / name, img);
    }
}

void run(const LocalizeOptions& o) {
    const EngineConfig config = o.config.resolve();
    std::map<std::string, StoreSession> sessions;
    for (const auto& dir : o.stores) {
        StoreSession s = open_store(dir);
        const std::string id = s.tokens->info().video_id;
        if (!sessions.emplace(id, std::move(s)).second)
            throw InputError("two stores hold video '" + id + "'");
    }
    const auto annotations = parse_annotations(read_file(o.annotations));
    std::vector<QueryResult> results;
    for (const auto& a : annotations) {
        const auto it = sessions.find(a.video_id);
        if (it == sessions.end())
            throw InputError("query " + a.query_id + " refers to video '" + a.video_id + "' but no store holds it");
        const auto& s = it->second;
        const LocalizationResult r = localize(a.request(), *s.tokens, s.backends, config);
        if (o.verbose) {
            std::cerr << a.query_id << "\n";
            for (const auto& line : r.provenance) std::cerr << "  " << line << "\n";
        }
        results.push_back({a.query_id, r.track.score, r.track});
        if (!o.overlays.empty()) dump_overlays(o.overlays, a.query_id, r.track, s);
    }
    write_file_atomic(o.out, results_to_json(results));
    std::cout << "localized " << results.size() << " queries -> " << o.out << "\n";
}

}  // namespace

void add_localize(CLI::App& app) {
    auto o = std::make_shared<LocalizeOptions>();
    auto* sub = app.add_subcommand("localize", "localize every annotated query");
    sub->add_option("--store", o->stores, "token store directory (repeatable)")->required();
    sub->add_option("--annotations", o->annotations, "annotations.json")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "results.json to write")->required();
    sub->add_option("--dump-overlays", o->overlays, "write PNG frames with the predicted boxes here");
    sub->add_flag("-v,--verbose", o->verbose, "print the per-stage log of each query");
    o->config.attach(*sub);
    sub->callback([o] { run(*o); });
}

}  // namespace vqloc::cli

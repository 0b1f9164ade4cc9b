#include <cstdio>
#include <iostream>
#include <memory>

#include "cli_common.hpp"
#include "commands.hpp"
#include "vqloc/error.hpp"
#include "vqloc/fs_util.hpp"
#include "vqloc/image.hpp"
#include "vqloc/metrics.hpp"
#include "vqloc/parallel.hpp"
#include "vqloc/synthetic.hpp"
#include "vqloc/token_store.hpp"
#include "vqloc/tokenizer.hpp"

namespace vqloc::cli {
namespace fs = std::filesystem;

namespace {

struct SynthOptions {
    std::uint64_t seed = 0;
    std::string params_path;
    std::string kind;
    std::string out;
    bool force = false;
    int threads = 0;
};

ScenarioKind parse_kind(const std::string& s) {
    if (s == "clean") return ScenarioKind::clean;
    if (s == "reappearance") return ScenarioKind::reappearance;
    if (s == "bleed") return ScenarioKind::bleed;
    throw InputError("unknown scenario kind '" + s + "'");
}

void run(const SynthOptions& o) {
    SyntheticParams params = SyntheticParams::preset(o.kind.empty() ? ScenarioKind::clean : parse_kind(o.kind));
    if (!o.params_path.empty()) {
        if (!o.kind.empty()) throw InputError("--kind and --params are mutually exclusive");
        params = params_from_json(read_file(o.params_path));
    }
    const fs::path out = o.out;
    if (fs::exists(out) && !fs::is_empty(out) && !o.force)
        throw InputError("output directory " + out.string() + " is not empty (use --force)");

    auto world = std::make_shared<const SyntheticWorld>(generate_scenario(o.seed, params));
    const auto& sc = world->scenario();
    const fs::path video = out / "video";
    fs::create_directories(video);
    write_file_atomic(video / "scenario.json", scenario_to_json(sc));

    const auto backends = make_synthetic_backends(world);
    const VideoInfo& info = world->info();
    parallel_for(static_cast<std::size_t>(info.frame_count()), o.threads, [&](std::size_t f) {
        const auto& entry = info.frames[f];
        write_png(video / entry.file, backends.frames->render(FrameView::full(entry.index, info.width, info.height)));
    });

    VideoInfo store_info = info;
    store_info.source_dir = "../video";
    const auto tokens = build_token_set(store_info, *backends.segmenter, *backends.extractor, o.threads);
    save_token_store(tokens, out / "store", o.force);

    std::vector<Annotation> annotations;
    for (const auto& q : sc.queries)
        annotations.push_back({q.query_id, sc.video_id(), q.query_frame, q.query_box, q.query_time, q.ground_truth});
    write_file_atomic(out / "annotations.json", annotations_to_json(annotations));

    std::cout << "synthesized " << sc.video_id() << ": " << info.frame_count() << " frames, " << tokens.size()
              << " tokens, " << annotations.size() << " queries -> " << out.string() << "\n";
}

}  // namespace

void add_synth(CLI::App& app) {
    auto o = std::make_shared<SynthOptions>();
    auto* sub = app.add_subcommand("synth", "generate a synthetic video, its token store and annotations");
    sub->add_option("--seed", o->seed, "scenario seed")->required();
    sub->add_option("--params", o->params_path, "JSON file with scenario parameters")->check(CLI::ExistingFile);
    sub->add_option("--kind", o->kind, "scenario preset: clean, reappearance or bleed");
    sub->add_option("--out", o->out, "output directory")->required();
    sub->add_flag("--force", o->force, "overwrite existing outputs");
    sub->add_option("--threads", o->threads, "worker threads (0 = all cores)");
    sub->callback([o] { run(*o); });
}

}  // namespace vqloc::cli

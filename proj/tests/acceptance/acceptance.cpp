// One PASS/FAIL line per acceptance criterion; exits nonzero when any fails.
// Usage: vqloc_acceptance <path to the vqloc CLI> <scratch directory>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "scenario_runner.hpp"
#include "vqloc/config.hpp"
#include "vqloc/feature_map.hpp"
#include "vqloc/fs_util.hpp"
#include "vqloc/metrics.hpp"
#include "vqloc/reiterate.hpp"
#include "vqloc/search.hpp"
#include "vqloc/synthetic.hpp"
#include "vqloc/tokenizer.hpp"

namespace fs = std::filesystem;
using namespace vqloc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------------------

Outcome nms_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double ts[] = {0.6, 0.7, 0.8, 0.9};
    int agree = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        std::vector<double> s(1 + rng() % 200);
        const int style = i % 3;
        for (auto& v : s) {
            if (style == 0) v = u(rng);
            else if (style == 1) v = std::round(u(rng) * 10) / 10;  // many ties
            else v = u(rng) < 0.3 ? 0.0 : u(rng);
        }
        const double t = ts[i % 4];
        const auto got = inter_frame_nms(s, t);
        const auto want = oracle::nms(s, t);
        bool same = got.size() == want.size();
        for (std::size_t k = 0; same && k < got.size(); ++k)
            same = static_cast<int>(got[k].index) == want[k].frame && got[k].score == want[k].score;
        agree += same;
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << agree << "/" << n << " sequences agree, " << secs << " s";
    return {agree == n && secs < 5.0, d.str()};
}

Outcome scoring_oracle() {
    std::mt19937_64 rng(2002);
    std::normal_distribution<double> g;
    double worst = 0.0;
    std::size_t pairs = 0;
    for (int d : {8, 64, 768}) {
        for (int round = 0; round < 10; ++round) {
            VideoInfo info;
            info.video_id = "scoring";
            info.width = 64;
            info.height = 64;
            info.dim = d;
            const int frames = 67;
            for (int f = 0; f < frames; ++f) info.frames.push_back({f, f, ""});
            TokenSetBuilder b(info);
            const auto mask = BinaryMask::from_rect(64, 64, 0, 0, 8, 8);
            for (int f = 0; f < frames; ++f)
                for (int r = 0; r < 5; ++r) {
                    std::vector<float> e(static_cast<std::size_t>(d));
                    for (auto& v : e) v = static_cast<float>(g(rng));
                    b.add({f, r, tight_bbox(mask), mask, 64.0 / 4096.0, std::move(e)});
                }
            const auto tokens = std::move(b).build();
            std::vector<QueryToken> qs(1 + rng() % 5);
            std::vector<std::vector<double>> qd;
            for (auto& q : qs) {
                q.embedding.resize(static_cast<std::size_t>(d));
                for (auto& v : q.embedding) v = static_cast<float>(g(rng));
                qd.emplace_back(q.embedding.begin(), q.embedding.end());
            }
            const auto table = score_tokens(tokens, qs, {0, frames - 1}, 2);
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                const auto e = tokens.embedding(i);
                worst = std::max(worst, std::abs(table.at(i) - oracle::max_cosine({e.begin(), e.end()}, qd)));
                ++pairs;
            }
        }
    }
    std::ostringstream d;
    d << pairs << " pairs, max |diff| " << worst;
    return {pairs >= 10000 && worst <= 1e-6, d.str()};
}

Outcome numeric_kernels() {
    std::mt19937 rng(3003);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    double resize_err = 0.0;
    double pool_err = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int h = 1 + static_cast<int>(rng() % 12);
        const int w = 1 + static_cast<int>(rng() % 12);
        const int d = 1 + static_cast<int>(rng() % 6);
        const int H = 1 + static_cast<int>(rng() % 40);
        const int W = 1 + static_cast<int>(rng() % 40);
        FeatureMap fm(h, w, d);
        for (auto& v : fm.data()) v = u(rng);
        const std::vector<double> src(fm.data().begin(), fm.data().end());
        const auto resized = resize_feature_map(fm, H, W);
        const auto want = oracle::bilinear(src, h, w, d, H, W);
        for (std::size_t k = 0; k < want.size(); ++k)
            resize_err = std::max(resize_err, std::abs(resized.data()[k] - want[k]));

        std::vector<int> cells(static_cast<std::size_t>(h) * w);
        MaskGrid grid(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (rng() % 3 == 0) {
                    grid.set(x, y, true);
                    cells[static_cast<std::size_t>(y) * w + x] = 1;
                }
        grid.set(0, 0, true);
        cells[0] = 1;
        const auto pooled = pool_region(fm, encode_mask(grid));
        const auto pool_want = oracle::masked_mean(src, cells, h, w, d);
        for (std::size_t c = 0; c < pool_want.size(); ++c)
            pool_err = std::max(pool_err, std::abs(pooled[c] - pool_want[c]));
    }

    double lap_err = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int w = 3 + static_cast<int>(rng() % 60);
        const int h = 3 + static_cast<int>(rng() % 60);
        std::vector<double> g(static_cast<std::size_t>(w) * h);
        for (auto& v : g) v = static_cast<double>(rng() % 256);
        const double want = oracle::laplacian_variance(g, w, h);
        lap_err = std::max(lap_err, std::abs(laplacian_variance(g, w, h) - want) / std::max(1.0, want));
    }
    std::vector<double> ramp(40 * 30);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 40; ++x) ramp[static_cast<std::size_t>(y) * 40 + x] = 2.0 * x + 5.0 * y + 1.0;
    const double ramp_var = laplacian_variance(ramp, 40, 30);

    std::ostringstream d;
    d << "resize " << resize_err << ", pool " << pool_err << ", laplacian " << lap_err << ", ramp " << ramp_var;
    return {resize_err <= 1e-6 && pool_err <= 1e-9 && lap_err <= 1e-6 && ramp_var == 0.0, d.str()};
}

ResponseTrack span_track(int s, int e, BBox box) {
    ResponseTrack t;
    for (int f = s; f <= e; ++f) t.boxes.push_back({f, box});
    return t;
}

Outcome metrics_oracle() {
    std::mt19937_64 rng(4004);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int fixture = 0; fixture < 50; ++fixture) {
        std::vector<Annotation> anns;
        std::vector<QueryResult> results;
        for (int q = 0; q < 20; ++q) {
            Annotation a;
            a.query_id = "f" + std::to_string(fixture) + "q" + std::to_string(q);
            a.video_id = "v";
            const int s = static_cast<int>(rng() % 80);
            const BBox box{u(rng) * 100, u(rng) * 100, 4 + u(rng) * 40, 4 + u(rng) * 40};
            a.gt_track = span_track(s, s + static_cast<int>(rng() % 15), box);
            for (auto& fb : a.gt_track.boxes) fb.box.x += u(rng) * 4;
            a.query_time = a.gt_track.end() + 3;
            anns.push_back(a);
            if (u(rng) < 0.1) continue;
            QueryResult r;
            r.query_id = a.query_id;
            r.score = u(rng) < 0.3 ? std::round(u(rng) * 5) / 5 : u(rng);
            const int ps = std::max(0, s + static_cast<int>(rng() % 15) - 7);
            BBox pb = box;
            pb.x += (u(rng) - 0.5) * 30;
            pb.w *= 0.6 + 0.8 * u(rng);
            r.track = span_track(ps, ps + static_cast<int>(rng() % 15), pb);
            results.push_back(r);
        }
        const auto got = evaluate(results, anns);
        const auto want = oracle::evaluate(results, anns);
        worst = std::max({worst, std::abs(got.stap25 - want.stap), std::abs(got.tap25 - want.tap),
                          std::abs(got.success - want.success), std::abs(got.recovery - want.recovery)});
    }
    const double t = temporal_iou(span_track(10, 20, {0, 0, 1, 1}), span_track(15, 25, {0, 0, 1, 1}));
    const double st = st_iou(span_track(3, 3, {0, 0, 10, 10}), span_track(3, 3, {5, 0, 10, 10}));
    std::ostringstream d;
    d << "50 fixtures, max |diff| " << worst << ", temporal_iou " << t << ", st_iou " << st;
    return {worst <= 1e-9 && std::abs(t - 0.375) < 1e-12 && std::abs(st - 1.0 / 3.0) < 1e-12, d.str()};
}

bool exact(const QueryResult& r, const Annotation& a) { return r.track.boxes == a.gt_track.boxes; }

Outcome clean_end_to_end() {
    const auto t0 = Clock::now();
    int hits = 0;
    int total = 0;
    std::string misses;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SyntheticParams p;
        p.distractors = static_cast<int>(seed % 6);
        const auto s = testing::prepare(seed, p);
        EngineConfig cfg;
        cfg.threads = 1;
        const auto results = testing::run_queries(s, cfg);
        const auto anns = s.annotations();
        for (std::size_t i = 0; i < anns.size(); ++i) {
            ++total;
            if (exact(results[i], anns[i])) ++hits;
            else misses += " " + std::to_string(seed);
        }
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << hits << "/" << total << " exact, " << secs << " s" << (misses.empty() ? "" : "; missed seeds:" + misses);
    return {total == 100 && hits >= 99 && secs < 60.0, d.str()};
}

void collect(const testing::PreparedScenario& s, const EngineConfig& cfg, std::vector<QueryResult>& out,
             std::vector<Annotation>* anns) {
    for (auto& r : testing::run_queries(s, cfg)) out.push_back(r);
    if (anns)
        for (auto& a : s.annotations()) anns->push_back(a);
}

Outcome hard_end_to_end() {
    EngineConfig full;
    full.threads = 1;
    EngineConfig no_reiter = full;
    no_reiter.reiterate = false;
    EngineConfig no_refine = full;
    no_refine.refine = false;

    std::vector<QueryResult> r_full, r_noreiter, b_full, b_norefine;
    std::vector<Annotation> r_anns, b_anns;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto r = testing::prepare(seed, SyntheticParams::preset(ScenarioKind::reappearance));
        collect(r, full, r_full, &r_anns);
        collect(r, no_reiter, r_noreiter, nullptr);
        const auto b = testing::prepare(seed, SyntheticParams::preset(ScenarioKind::bleed));
        collect(b, full, b_full, &b_anns);
        collect(b, no_refine, b_norefine, nullptr);
    }
    const double a1 = evaluate(r_full, r_anns).stap25;
    const double a0 = evaluate(r_noreiter, r_anns).stap25;
    const double b1 = evaluate(b_full, b_anns).stap25;
    const double b0 = evaluate(b_norefine, b_anns).stap25;
    std::ostringstream d;
    d << "reappearance stAP25 full " << a1 << " vs no-reiterate " << a0 << "; bleed stAP25 full " << b1
      << " vs no-refine " << b0;
    return {a1 > a0 && b1 > b0, d.str()};
}

Outcome defaults_audit() {
    const EngineConfig c;
    const bool ok = c.k == 10 && c.t_sim == 0.7 && c.t_nms == 0.8 && c.t_q == 0.5 && c.zoom_cap == 2.5 &&
                    c.area_min_fraction == 0.0007 && c.blur_var_min == 100.0 && c.fps == 5.0;
    return {ok, "k=10 t_sim=0.7 t_nms=0.8 t_q=0.5 zoom_cap=2.5 area_min_fraction=0.0007 blur_var_min=100 fps=5"};
}

Outcome token_count_invariance() {
    std::vector<std::size_t> counts;
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SyntheticParams p;
        p.frame_count = 50;
        const auto world = std::make_shared<const SyntheticWorld>(generate_scenario(seed, p));
        std::size_t prev = 0;
        for (int stride : {4, 16}) {
            const auto b = make_synthetic_backends(world, stride);
            const auto n = build_token_set(world->info(), *b.segmenter, *b.extractor, 1).size();
            if (stride == 16) ok = ok && n == prev;
            prev = n;
            counts.push_back(n);
        }
        ok = ok && prev == world->scenario().planted_region_count();
    }
    std::ostringstream d;
    d << "region counts at strides 4/16:";
    for (std::size_t i = 0; i < counts.size(); i += 2) d << " " << counts[i] << "/" << counts[i + 1];
    return {ok, d.str()};
}

int run(const std::string& cmd) {
    const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return rc;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome cli_determinism(const fs::path& cli, const fs::path& scratch) {
    const unsigned hw = std::max(2u, std::thread::hardware_concurrency());
    const int n = static_cast<int>(std::min(hw, 8u));
    std::vector<std::string> outputs;
    std::string failure;
    int idx = 0;
    for (int threads : {1, n, 1, n}) {
        const fs::path dir = scratch / ("det" + std::to_string(idx++));
        fs::remove_all(dir);
        const std::string t = " --threads " + std::to_string(threads);
        const std::string c = quote(cli);
        const int a = run(c + " synth --seed 7 --kind reappearance --out " + quote(dir / "synth") + t);
        const int b = run(c + " prepare --video-dir " + quote(dir / "synth" / "video") + " --backend synthetic --out " +
                          quote(dir / "store") + t);
        const int l = run(c + " localize --store " + quote(dir / "store") + " --annotations " +
                          quote(dir / "synth" / "annotations.json") + " --out " + quote(dir / "results.json") + t);
        if (a || b || l) {
            failure = "CLI exited nonzero (synth " + std::to_string(a) + ", prepare " + std::to_string(b) +
                      ", localize " + std::to_string(l) + ")";
            break;
        }
        outputs.push_back(read_file(dir / "results.json"));
    }
    if (!failure.empty()) return {false, failure};
    bool same = true;
    for (const auto& o : outputs) same = same && o == outputs.front();
    std::ostringstream d;
    d << "4 runs (threads 1, " << n << ", 1, " << n << "), results.json " << outputs.front().size() << " bytes, "
      << (same ? "byte-identical" : "DIFFERENT");
    return {same && !outputs.front().empty(), d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: vqloc_acceptance <vqloc cli> <scratch dir>\n";
        return 2;
    }
    const fs::path cli = argv[1];
    const fs::path scratch = argv[2];
    fs::create_directories(scratch);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle equivalence, search (inter-frame NMS)", nms_oracle},
        {"oracle equivalence, scoring", scoring_oracle},
        {"numeric kernels", numeric_kernels},
        {"metrics oracle", metrics_oracle},
        {"end-to-end synthetic, clean", clean_end_to_end},
        {"end-to-end synthetic, hard", hard_end_to_end},
        {"defaults audit", defaults_audit},
        {"token-count invariance", token_count_invariance},
        {"determinism (CLI, threads)", [&] { return cli_determinism(cli, scratch); }},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}

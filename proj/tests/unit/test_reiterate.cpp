#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenario_runner.hpp"
#include "vqloc/error.hpp"
#include "vqloc/localize.hpp"
#include "vqloc/reiterate.hpp"
#include "vqloc/tracker.hpp"

using namespace vqloc;
using testing::make_tokens;
using testing::query;
using testing::TokenSpec;

namespace {

std::vector<double> checkerboard(int w, int h) {
    std::vector<double> g(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) g[static_cast<std::size_t>(y) * w + x] = (x + y) % 2 ? 255.0 : 0.0;
    return g;
}

class FlatFrames final : public FrameSource {
public:
    FlatFrames(VideoInfo info, bool textured) : info_(std::move(info)), textured_(textured) {}
    const VideoInfo& info() const override { return info_; }
    Image render(const FrameView& view) const override {
        Image img(view.width, view.height);
        for (int y = 0; y < view.height; ++y)
            for (int x = 0; x < view.width; ++x) {
                const std::uint8_t v = textured_ && (x / 2 + y / 2) % 2 ? 255 : 40;
                std::fill(img.pixel(x, y), img.pixel(x, y) + 3, v);
            }
        return img;
    }

private:
    VideoInfo info_;
    bool textured_;
};

// Target (1, 0) at box A on frames 1-2, a rotated view on frames 6-7 and background
// tokens (0, 1) at box B on every frame.
VideoTokenSet reappearance_fixture(std::vector<float> late_view) {
    const BBox a{0, 0, 10, 10};
    const BBox b{50, 50, 10, 10};
    std::vector<std::vector<TokenSpec>> frames(10, std::vector<TokenSpec>{{{0, 1}, b}});
    for (int f : {1, 2}) frames[static_cast<std::size_t>(f)].push_back({{1, 0}, a});
    for (int f : {6, 7}) frames[static_cast<std::size_t>(f)].push_back({late_view, a});
    return make_tokens(frames);
}

ResponseTrack first_track() {
    ResponseTrack t;
    t.boxes = {{1, {0, 0, 10, 10}}, {2, {0, 0, 10, 10}}};
    t.score = 1.0;
    return t;
}

}  // namespace

TEST_SUITE("reiterate") {

TEST_CASE("laplacian_variance goldens") {
    CHECK(laplacian_variance(std::vector<double>(25, 17.0), 5, 5) == 0.0);
    std::vector<double> ramp(12 * 9);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 12; ++x) ramp[static_cast<std::size_t>(y) * 12 + x] = 3.0 * x + 7.0 * y + 2.0;
    CHECK(laplacian_variance(ramp, 12, 9) == 0.0);
    CHECK(laplacian_variance(checkerboard(8, 8), 8, 8) == doctest::Approx(1040400.0).epsilon(1e-12));
    CHECK(laplacian_variance(checkerboard(5, 5), 5, 5) == doctest::Approx(1040400.0 * 80.0 / 81.0).epsilon(1e-12));
    CHECK_THROWS_AS(laplacian_variance(std::vector<double>(6, 0.0), 3, 2), InputError);

    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
        const int w = 3 + static_cast<int>(rng() % 30);
        const int h = 3 + static_cast<int>(rng() % 30);
        std::vector<double> g(static_cast<std::size_t>(w) * h);
        for (auto& v : g) v = static_cast<double>(rng() % 256);
        CHECK(laplacian_variance(g, w, h) == doctest::Approx(oracle::laplacian_variance(g, w, h)).epsilon(1e-9));
    }

    Image img(4, 4);
    CHECK(laplacian_variance(img) == 0.0);
}

TEST_CASE("expand_queries filters by similarity, area and blur") {
    std::vector<std::vector<TokenSpec>> frames(4);
    frames[0] = {{{1, 0}, {0, 0, 40, 40}}};
    frames[1] = {{{0.4f, 0.9165f}, {0, 0, 40, 40}}};
    frames[2] = {{{0.8f, 0.6f}, {0, 0, 40, 40}}};
    frames[3] = {{{1, 0}, {0, 0, 20, 20}}};
    const auto tokens = make_tokens(frames, 1024, 768);
    ResponseTrack track;
    for (int f = 0; f < 4; ++f)
        track.boxes.push_back({f, tokens.record(tokens.frame_begin(f)).bbox});
    const QueryToken original = query({1, 0});
    const EngineConfig cfg;

    const auto kept = expand_queries(track, tokens, Backends{}, original, cfg);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].source_frame == 0);
    CHECK(kept[1].source_frame == 2);
    CHECK(kept[1].sim_to_original == doctest::Approx(0.8).epsilon(1e-6));
    for (const auto& q : kept) CHECK(q.origin == QueryOrigin::expanded);
    CHECK(400.0 / (1024.0 * 768.0) < cfg.area_min_fraction);

    Backends flat;
    flat.frames = std::make_shared<FlatFrames>(tokens.info(), false);
    CHECK(expand_queries(track, tokens, flat, original, cfg).empty());
    Backends sharp;
    sharp.frames = std::make_shared<FlatFrames>(tokens.info(), true);
    const auto with_blur = expand_queries(track, tokens, sharp, original, cfg);
    REQUIRE(with_blur.size() == 2);
    CHECK(with_blur[0].blur_variance >= cfg.blur_var_min);
}

TEST_CASE("relocalize update rules") {
    EngineConfig cfg;
    cfg.threads = 1;
    const std::vector<QueryToken> pool{query({1, 0})};

    const auto same = reappearance_fixture({1, 0});
    const GreedyTokenTracker same_tracker(same, cfg);
    const auto up = relocalize(same, Backends{}, pool, first_track(), 9, cfg, same_tracker);
    CHECK(up.updated);
    CHECK(up.track.start() == 6);
    CHECK(up.track.end() == 7);
    CHECK(up.track.score == doctest::Approx(1.0).epsilon(1e-9));

    const auto weak = reappearance_fixture({0.8f, 0.6f});
    const GreedyTokenTracker weak_tracker(weak, cfg);
    auto lower = cfg;
    lower.t_sim = 0.5;
    const auto kept = relocalize(weak, Backends{}, pool, first_track(), 9, lower, weak_tracker);
    REQUIRE(kept.pass.track);
    CHECK(kept.pass.track->start() == 6);
    CHECK_FALSE(kept.updated);
    CHECK(kept.track == first_track());

    auto never = cfg;
    never.update_ratio = INFINITY;
    const auto frozen = relocalize(same, Backends{}, pool, first_track(), 9, never, same_tracker);
    CHECK_FALSE(frozen.updated);
    CHECK(frozen.track == first_track());

    const auto none = relocalize(same, Backends{}, pool, first_track(), 5, cfg, same_tracker);
    CHECK_FALSE(none.updated);
    CHECK(none.track == first_track());

    const auto empty_window = relocalize(same, Backends{}, pool, first_track(), 2, cfg, same_tracker);
    CHECK(empty_window.track == first_track());
}

TEST_CASE("reiteration recovers a perturbed final appearance") {
    const auto params = SyntheticParams::preset(ScenarioKind::reappearance);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = testing::prepare(seed, params);
        const auto& q = s.scenario().queries.front();
        const auto annotations = s.annotations();
        const auto r = localize(annotations.front().request(), s.tokens, s.backends, EngineConfig{});
        REQUIRE(r.first_pass_track);
        CHECK(r.first_pass_track->end() < q.ground_truth.start());
        CHECK(r.updated_by_reiteration);
        CHECK(r.track == ResponseTrack{q.ground_truth.boxes, r.track.score});
        CHECK(r.expanded_queries > 0);
        CHECK(r.track.start() > r.first_pass_track->end());
    }
}

TEST_CASE("update_ratio = inf degenerates to the single-pass pipeline") {
    const auto params = SyntheticParams::preset(ScenarioKind::reappearance);
    EngineConfig never;
    never.update_ratio = INFINITY;
    EngineConfig single;
    single.reiterate = false;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = testing::prepare(seed, params);
        const auto a = testing::run_queries(s, never);
        const auto b = testing::run_queries(s, single);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].track == b[i].track);
    }
}

TEST_CASE("localize on clean scenarios") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto s = testing::prepare(seed, SyntheticParams{});
        const auto ann = s.annotations().front();
        const auto r = localize(ann.request(), s.tokens, s.backends, EngineConfig{});
        CHECK(r.track.boxes == ann.gt_track.boxes);
        CHECK_FALSE(r.provenance.empty());

        const auto& target = s.scenario().objects.front();
        int latest = -1;
        for (const auto& app : target.appearances)
            if (app.start <= ann.query_time) latest = app.start;
        CHECK(r.track.start() == latest);

        auto early = ann.request();
        early.query_time = target.appearances.front().start - 1;
        const auto e = localize(early, s.tokens, s.backends, EngineConfig{});
        REQUIRE_FALSE(e.track.empty());
        CHECK(e.track.end() <= early.query_time);
    }
}

TEST_CASE("localize input errors") {
    const auto s = testing::prepare(1, SyntheticParams{});
    auto req = s.annotations().front().request();
    req.query_time = 1000;
    CHECK_THROWS_AS(localize(req, s.tokens, s.backends, EngineConfig{}), InputError);
    req = s.annotations().front().request();
    req.query_frame = -1;
    CHECK_THROWS_AS(localize(req, s.tokens, s.backends, EngineConfig{}), InputError);
    EngineConfig bad;
    bad.k = 0;
    CHECK_THROWS_AS(localize(s.annotations().front().request(), s.tokens, s.backends, bad), InputError);
}

}

#include <doctest.h>

#include <filesystem>
#include <random>

#include "scenario_runner.hpp"
#include "vqloc/error.hpp"
#include "vqloc/fs_util.hpp"
#include "vqloc/synthetic.hpp"
#include "vqloc/token_store.hpp"
#include "vqloc/tokenizer.hpp"
#include "vqloc/vector_math.hpp"

using namespace vqloc;
namespace fs = std::filesystem;

namespace {

class FixedSegmenter final : public SegmenterBackend {
public:
    explicit FixedSegmenter(std::vector<BinaryMask> masks) : masks_(std::move(masks)) {}
    std::string id() const override { return "fixed"; }
    std::vector<BinaryMask> segment(const FrameView&) const override { return masks_; }

private:
    std::vector<BinaryMask> masks_;
};

class RampExtractor final : public FeatureBackend {
public:
    std::string id() const override { return "ramp"; }
    int depth() const override { return 2; }
    FeatureMap extract(const FrameView& v) const override {
        FeatureMap fm(v.height, v.width, 2);
        for (int y = 0; y < v.height; ++y)
            for (int x = 0; x < v.width; ++x) {
                fm.cell(y, x)[0] = static_cast<float>(x + 1);
                fm.cell(y, x)[1] = static_cast<float>(y + 1);
            }
        return fm;
    }
};

class FailingExtractor final : public FeatureBackend {
public:
    std::string id() const override { return "failing"; }
    int depth() const override { return 2; }
    FeatureMap extract(const FrameView&) const override { throw std::runtime_error("out of memory"); }
};

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("vqloc_unit_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_SUITE("tokenizer") {

TEST_CASE("tokenize_frame: one token per mask, in mask order") {
    const auto view = FrameView::full(3, 8, 6);
    RampExtractor ext;
    CHECK(tokenize_frame(view, FixedSegmenter({}), ext).empty());

    const std::vector<BinaryMask> masks{BinaryMask::from_rect(8, 6, 0, 0, 2, 2), BinaryMask::from_rect(8, 6, 4, 1, 8, 6),
                                        BinaryMask::from_rect(8, 6, 5, 5, 6, 6)};
    const auto tokens = tokenize_frame(view, FixedSegmenter(masks), ext);
    REQUIRE(tokens.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(tokens[static_cast<std::size_t>(i)].region_id == i);
        CHECK(tokens[static_cast<std::size_t>(i)].frame_index == 3);
        CHECK(tokens[static_cast<std::size_t>(i)].bbox == tight_bbox(masks[static_cast<std::size_t>(i)]));
    }
    CHECK(tokens[0].embedding[0] == doctest::Approx(1.5));
    CHECK(tokens[0].embedding[1] == doctest::Approx(1.5));
    CHECK(tokens[2].area_fraction == doctest::Approx(1.0 / 48.0));
}

TEST_CASE("tokenize_frame attaches the frame index to backend failures") {
    const auto view = FrameView::full(17, 8, 6);
    FailingExtractor bad;
    try {
        tokenize_frame(view, FixedSegmenter({BinaryMask::from_rect(8, 6, 0, 0, 2, 2)}), bad);
        FAIL("expected BackendError");
    } catch (const BackendError& e) {
        CHECK(e.frame_index() == 17);
        CHECK(std::string(e.what()).find("frame 17") != std::string::npos);
    }
}

TEST_CASE("tokenize_query association and fallback") {
    const auto view = FrameView::full(0, 20, 20);
    RampExtractor ext;
    const FixedSegmenter seg({BinaryMask::from_rect(20, 20, 0, 0, 10, 10), BinaryMask::from_rect(20, 20, 12, 12, 20, 20)});

    const auto exact = tokenize_query(view, {12, 12, 8, 8}, seg, ext);
    CHECK_FALSE(exact.box_interior_fallback);
    CHECK(exact.origin == QueryOrigin::original);
    CHECK(exact.sim_to_original == 1.0);
    CHECK(exact.embedding[0] == doctest::Approx(16.5));

    CHECK(best_matching_mask({{0, 0, 10, 10}, {0, 0, 2, 2}}, {0, 0, 9, 10}) == 0);
    CHECK(best_matching_mask({{0, 0, 10, 10}}, {15, 15, 2, 2}) == -1);

    const auto fallback = tokenize_query(view, {10, 0, 2, 4}, seg, ext);
    CHECK(fallback.box_interior_fallback);
    CHECK(fallback.embedding[0] == doctest::Approx(11.5));
    CHECK(fallback.embedding[1] == doctest::Approx(2.5));

    CHECK_THROWS_AS(tokenize_query(view, {30, 30, 4, 4}, seg, ext), InputError);
}

TEST_CASE("synthetic tokens match the planted embeddings") {
    SyntheticParams p;
    p.feature_stride = 1;
    p.frame_count = 12;
    const auto s = testing::prepare(21, p);
    const auto& sc = s.scenario();
    std::size_t checked = 0;
    for (int f = 0; f < p.frame_count; ++f) {
        const auto& placements = s.world->placements(f);
        for (std::size_t k = 0; k < placements.size(); ++k) {
            const std::size_t i = s.tokens.frame_begin(f) + k;
            CHECK(s.tokens.record(i).bbox == placements[k].box);
            const auto e = s.tokens.embedding(i);
            for (std::size_t c = 0; c < e.size(); ++c) CHECK(e[c] == doctest::Approx(placements[k].embedding[c]).epsilon(1e-6));
            ++checked;
        }
    }
    CHECK(checked > 0);
    CHECK(s.tokens.size() == sc.planted_region_count());
}

TEST_CASE("token count equals the planted region count and ignores feature resolution") {
    SyntheticParams p;
    p.frame_count = 50;
    const auto world = std::make_shared<const SyntheticWorld>(generate_scenario(7, p));
    std::size_t counts[3];
    int k = 0;
    for (int stride : {4, 8, 16}) {
        const auto b = make_synthetic_backends(world, stride);
        const auto tokens = build_token_set(world->info(), *b.segmenter, *b.extractor, 1);
        counts[k++] = tokens.size();
    }
    CHECK(counts[0] == world->scenario().planted_region_count());
    CHECK(counts[0] == counts[1]);
    CHECK(counts[1] == counts[2]);
}

TEST_CASE("build_token_set is independent of the thread count") {
    const auto world = std::make_shared<const SyntheticWorld>(generate_scenario(3, SyntheticParams{}));
    const auto b = make_synthetic_backends(world);
    const auto one = build_token_set(world->info(), *b.segmenter, *b.extractor, 1);
    const auto four = build_token_set(world->info(), *b.segmenter, *b.extractor, 4);
    CHECK(one.records() == four.records());
    CHECK(one.embeddings() == four.embeddings());

    VideoInfo empty = world->info();
    empty.frames.clear();
    CHECK(build_token_set(empty, *b.segmenter, *b.extractor).empty());
}

TEST_CASE("token store round-trip is lossless and re-saves identical bytes") {
    SyntheticParams p;
    p.frame_count = 20;
    p.noise = 0.2;
    const auto s = testing::prepare(5, p);
    const fs::path a = temp_dir("store_a");
    const fs::path b = temp_dir("store_b");
    save_token_store(s.tokens, a);
    const auto loaded = load_token_store(a);
    CHECK(loaded.info() == s.tokens.info());
    CHECK(loaded.records() == s.tokens.records());
    CHECK(loaded.embeddings() == s.tokens.embeddings());
    save_token_store(loaded, b);
    for (const char* f : {"manifest.json", "regions.jsonl", "embeddings.bin"}) CHECK(read_file(a / f) == read_file(b / f));
    CHECK(check_token_store(a).empty());
    CHECK_THROWS_AS(save_token_store(loaded, a), InputError);
    CHECK_NOTHROW(save_token_store(loaded, a, true));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("token store schema errors") {
    VideoInfo info;
    info.video_id = "v";
    info.width = 4;
    info.height = 4;
    info.dim = 2;
    for (int i = 0; i < 100; ++i)
        if (i != 57) info.frames.push_back({i, i, "f.png"});
    std::string manifest = manifest_json(info, 0);
    // frame_count from the listing is 99; claim 100 so only the gap is wrong
    manifest.replace(manifest.find("\"frame_count\": 99"), 17, "\"frame_count\": 100");
    try {
        parse_manifest(manifest);
        FAIL("expected FrameGapError");
    } catch (const FrameGapError& e) {
        CHECK(e.missing_frame() == 57);
        CHECK(std::string(e.what()) == "missing frame 57");
    }
    CHECK_THROWS_AS(parse_manifest("{\"schema_version\": 2}"), FormatError);
    CHECK_THROWS_AS(load_token_store(temp_dir("missing")), InputError);
}

TEST_CASE("token set rejects bad input") {
    VideoInfo info;
    info.video_id = "v";
    info.width = 4;
    info.height = 4;
    info.dim = 2;
    info.frames = {{0, 0, ""}, {1, 1, ""}};
    const auto mask = BinaryMask::from_rect(4, 4, 0, 0, 2, 2);
    std::vector<RegionRecord> records{{1, 0, tight_bbox(mask), mask, 0.25}, {0, 0, tight_bbox(mask), mask, 0.25}};
    CHECK_THROWS_AS(VideoTokenSet(info, records, {1, 0, 1, 0}), FormatError);
    records = {{0, 0, tight_bbox(mask), mask, 0.25}};
    CHECK_THROWS_AS(VideoTokenSet(info, records, {1, 0, 1}), FormatError);
    CHECK_THROWS_AS(VideoTokenSet(info, records, {NAN, 0}), FormatError);
    const VideoTokenSet ok(info, records, {3, 4});
    CHECK(ok.embedding_norm(0) == 5.0);
    CHECK(ok.frame_size(0) == 1);
    CHECK(ok.frame_size(1) == 0);
}

}

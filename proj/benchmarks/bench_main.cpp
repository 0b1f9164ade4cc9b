#include <benchmark/benchmark.h>

#include <random>

#include "vqloc/feature_map.hpp"
#include "vqloc/search.hpp"
#include "vqloc/token_set.hpp"

using namespace vqloc;

namespace {

VideoTokenSet random_tokens(int frames, int per_frame, int dim) {
    std::mt19937 rng(1);
    std::normal_distribution<float> g;
    VideoInfo info;
    info.video_id = "bench";
    info.width = 64;
    info.height = 64;
    info.dim = dim;
    for (int f = 0; f < frames; ++f) info.frames.push_back({f, f, ""});
    TokenSetBuilder b(info);
    const auto mask = BinaryMask::from_rect(64, 64, 0, 0, 8, 8);
    for (int f = 0; f < frames; ++f)
        for (int r = 0; r < per_frame; ++r) {
            std::vector<float> e(static_cast<std::size_t>(dim));
            for (auto& v : e) v = g(rng);
            b.add({f, r, tight_bbox(mask), mask, 64.0 / 4096.0, std::move(e)});
        }
    return std::move(b).build();
}

void BM_ScoreTokens(benchmark::State& state) {
    // 150k tokens of dimension 768 against a pool of queries
    static const VideoTokenSet tokens = random_tokens(1500, 100, 768);
    std::mt19937 rng(2);
    std::normal_distribution<float> g;
    std::vector<QueryToken> qs(static_cast<std::size_t>(state.range(0)));
    for (auto& q : qs) {
        q.embedding.resize(768);
        for (auto& v : q.embedding) v = g(rng);
    }
    for (auto _ : state) {
        auto t = score_tokens(tokens, qs, {0, tokens.frame_count() - 1}, 0);
        benchmark::DoNotOptimize(t.scores.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tokens.size()));
}
BENCHMARK(BM_ScoreTokens)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_InterFrameNms(benchmark::State& state) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(static_cast<std::size_t>(state.range(0)));
    for (auto& v : s) v = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(inter_frame_nms(s, 0.8));
}
BENCHMARK(BM_InterFrameNms)->Arg(200)->Arg(5000);

void BM_PoolResized(benchmark::State& state) {
    std::mt19937 rng(4);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    FeatureMap fm(64, 64, 256);
    for (auto& v : fm.data()) v = u(rng);
    const auto mask = BinaryMask::from_rect(1024, 1024, 300, 200, 700, 650);
    for (auto _ : state) benchmark::DoNotOptimize(pool_resized(fm, mask));
}
BENCHMARK(BM_PoolResized)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();

#include "vqloc/reiterate.hpp"

#include <cmath>

#include "vqloc/error.hpp"
#include "vqloc/refine.hpp"
#include "vqloc/tokenizer.hpp"
#include "vqloc/vector_math.hpp"

namespace vqloc {

double laplacian_variance(std::span<const double> gray, int width, int height) {
    if (width < 3 || height < 3)
        throw InputError("laplacian_variance needs at least 3x3 pixels, got " + std::to_string(width) + "x" +
                         std::to_string(height));
    if (gray.size() != static_cast<std::size_t>(width) * height) throw InputError("gray image size mismatch");
    const auto at = [&](int x, int y) { return gray[static_cast<std::size_t>(y) * width + x]; };
    double sum = 0.0;
    double sum_sq = 0.0;
    const double n = static_cast<double>(width - 2) * (height - 2);
    for (int y = 1; y < height - 1; ++y)
        for (int x = 1; x < width - 1; ++x) {
            const double r = at(x, y - 1) + at(x - 1, y) + at(x + 1, y) + at(x, y + 1) - 4.0 * at(x, y);
            sum += r;
            sum_sq += r * r;
        }
    const double mean = sum / n;
    return std::max(0.0, sum_sq / n - mean * mean);
}

double laplacian_variance(const Image& image) {
    return laplacian_variance(to_grayscale(image), image.width, image.height);
}

std::vector<QueryToken> expand_queries(const ResponseTrack& track, const VideoTokenSet& tokens,
                                       const Backends& backends, const QueryToken& original,
                                       const EngineConfig& config) {
    std::vector<QueryToken> out;
    const VideoInfo& info = tokens.info();
    const double frame_area = static_cast<double>(info.width) * info.height;
    for (const auto& fb : track.boxes) {
        auto q = query_from_tokens(tokens, fb.frame, fb.box);
        if (!q) continue;
        q->origin = QueryOrigin::expanded;
        q->sim_to_original = cosine(q->embedding, original.embedding);
        if (q->sim_to_original < config.t_q) continue;
        q->area_fraction = clamp_to_frame(fb.box, info.width, info.height).area() / frame_area;
        if (q->area_fraction < config.area_min_fraction) continue;
        if (backends.frames) {
            FrameView view = FrameView::full(fb.frame, info.width, info.height);
            if (config.blur_on_crop)
                view = compute_crop(clamp_to_frame(fb.box, info.width, info.height), info.width, info.height,
                                    config.zoom_cap, config.crop_target_occupancy)
                           .view(fb.frame);
            q->blur_variance = laplacian_variance(backends.frames->render(view));
            if (q->blur_variance < config.blur_var_min) continue;
        }
        out.push_back(std::move(*q));
    }
    return out;
}

RelocalizeOutcome relocalize(const VideoTokenSet& tokens, const Backends& backends, std::span<const QueryToken> pool,
                             const ResponseTrack& prev, int query_time, const EngineConfig& config,
                             const TrackerBackend& tracker) {
    RelocalizeOutcome outcome;
    outcome.track = prev;
    const FrameRange window{prev.empty() ? 0 : prev.end() + 1, query_time};
    outcome.pass.window = window;
    if (window.empty()) return outcome;
    outcome.pass = run_pass(tokens, backends, pool, window, config, tracker, false);
    if (!outcome.pass.track) return outcome;
    const ResponseTrack& fresh = *outcome.pass.track;
    if (std::isinf(config.update_ratio) && config.update_ratio > 0) return outcome;
    if (prev.empty() || fresh.score >= config.update_ratio * prev.score) {
        outcome.track = fresh;
        outcome.updated = true;
    }
    return outcome;
}

}  // namespace vqloc

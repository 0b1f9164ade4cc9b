#include "vqloc/refine.hpp"

#include <algorithm>
#include <cmath>

#include "vqloc/error.hpp"
#include "vqloc/parallel.hpp"
#include "vqloc/tokenizer.hpp"
#include "vqloc/vector_math.hpp"

namespace vqloc {

CropSpec compute_crop(const BBox& box, int frame_width, int frame_height, double zoom_cap, double occupancy) {
    const double W = frame_width;
    const double H = frame_height;
    const double rel = std::max(box.w / W, box.h / H);
    double zoom = rel > 0.0 ? occupancy / rel : zoom_cap;
    zoom = std::clamp(zoom, 1.0, std::max(1.0, zoom_cap));
    CropSpec spec;
    spec.zoom = zoom;
    spec.width = frame_width;
    spec.height = frame_height;
    if (zoom == 1.0) {
        spec.crop = {0.0, 0.0, W, H};
        return spec;
    }
    const double cw = W / zoom;
    const double ch = H / zoom;
    const double x = std::clamp(box.center_x() - 0.5 * cw, 0.0, W - cw);
    const double y = std::clamp(box.center_y() - 0.5 * ch, 0.0, H - ch);
    spec.crop = {x, y, cw, ch};
    return spec;
}

RefinedView refine_box(int frame_index, const BBox& box, const VideoInfo& video, const Backends& backends,
                       const EngineConfig& config) {
    RefinedView out;
    if (!backends.segmenter || !backends.extractor) {
        out.failure = "no segmenter/extractor available";
        return out;
    }
    const BBox clipped = clamp_to_frame(box, video.width, video.height);
    if (!clipped.valid()) {
        out.failure = "box outside the frame";
        return out;
    }
    const CropSpec spec = compute_crop(clipped, video.width, video.height, config.zoom_cap,
                                       config.crop_target_occupancy);
    out.zoom = spec.zoom;
    const FrameView view = spec.view(frame_index);
    try {
        auto masks = backends.segmenter->segment(view);
        std::vector<BBox> boxes;
        boxes.reserve(masks.size());
        for (const auto& m : masks) {
            if (m.width() != view.width || m.height() != view.height)
                throw BackendError(frame_index, "segmenter " + backends.segmenter->id() +
                                                    " returned a mask of the wrong size");
            boxes.push_back(tight_bbox(m));
        }
        const int best = best_matching_mask(boxes, view.to_view(clipped));
        if (best < 0) {
            out.failure = "no crop mask overlaps the box";
            return out;
        }
        const auto pooled = pool_resized(backends.extractor->extract(view), masks[static_cast<std::size_t>(best)]);
        out.embedding = to_float(pooled);
        out.bbox = view.to_source(boxes[static_cast<std::size_t>(best)]);
        out.ok = true;
    } catch (const UnsupportedViewError& e) {
        out.failure = e.what();
    }
    return out;
}

std::vector<RefinedCandidate> refine_candidates(std::span<const ScoredCandidate> candidates,
                                                const VideoTokenSet& tokens, const Backends& backends,
                                                const EngineConfig& config) {
    std::vector<RefinedCandidate> out(candidates.size());
    parallel_for(candidates.size(), config.threads, [&](std::size_t i) {
        const auto& c = candidates[i];
        auto& r = out[i];
        r.original = c;
        r.candidate = c;
        const RefinedView v = refine_box(c.frame_index, c.bbox, tokens.info(), backends, config);
        r.zoom = v.zoom;
        if (v.ok) {
            r.refined = true;
            r.candidate.bbox = v.bbox;
            r.embedding = v.embedding;
        } else {
            r.failure = v.failure;
            const auto e = tokens.embedding(c.token_index);
            r.embedding.assign(e.begin(), e.end());
        }
    });
    return out;
}

std::vector<QueryToken> refine_queries(std::span<const QueryToken> queries, const VideoInfo& video,
                                       const Backends& backends, const EngineConfig& config) {
    std::vector<std::optional<QueryToken>> refined(queries.size());
    parallel_for(queries.size(), config.threads, [&](std::size_t i) {
        const auto& q = queries[i];
        if (!q.source_frame || !q.source_box) return;
        const RefinedView v = refine_box(*q.source_frame, *q.source_box, video, backends, config);
        if (!v.ok) return;
        QueryToken r = q;
        r.embedding = v.embedding;
        r.source_box = v.bbox;
        r.box_interior_fallback = false;
        refined[i] = std::move(r);
    });
    std::vector<QueryToken> out;
    for (auto& r : refined)
        if (r) out.push_back(std::move(*r));
    return out;
}

std::vector<RefinedCandidate> rescore_and_filter(std::vector<RefinedCandidate> candidates,
                                                 std::span<const QueryToken> queries, double t_sim) {
    if (queries.empty()) throw InputError("rescoring needs at least one query token");
    std::vector<RefinedCandidate> out;
    for (auto& c : candidates) {
        double best = -1.0;
        for (const auto& q : queries) {
            if (q.embedding.size() != c.embedding.size()) throw InputError("query and candidate dimensions differ");
            best = std::max(best, cosine(c.embedding, q.embedding));
        }
        c.candidate.score = best;
        if (best >= t_sim) out.push_back(std::move(c));
    }
    return out;
}

}  // namespace vqloc

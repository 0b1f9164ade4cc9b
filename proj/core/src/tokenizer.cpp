#include "vqloc/tokenizer.hpp"

#include <cmath>

#include "vqloc/error.hpp"
#include "vqloc/parallel.hpp"
#include "vqloc/vector_math.hpp"

namespace vqloc {
namespace {

std::vector<BinaryMask> run_segmenter(const FrameView& view, const SegmenterBackend& segmenter) {
    std::vector<BinaryMask> masks;
    try {
        masks = segmenter.segment(view);
    } catch (const BackendError&) {
        throw;
    } catch (const std::exception& e) {
        throw BackendError(view.frame_index, std::string("segmenter ") + segmenter.id() + ": " + e.what());
    }
    for (const auto& m : masks)
        if (m.width() != view.width || m.height() != view.height)
            throw BackendError(view.frame_index, "segmenter " + segmenter.id() + " returned a mask of the wrong size");
    return masks;
}

FeatureMap run_extractor(const FrameView& view, const FeatureBackend& extractor) {
    try {
        return extractor.extract(view);
    } catch (const BackendError&) {
        throw;
    } catch (const std::exception& e) {
        throw BackendError(view.frame_index, std::string("extractor ") + extractor.id() + ": " + e.what());
    }
}

double area_fraction(const BinaryMask& m) {
    return static_cast<double>(m.foreground()) / (static_cast<double>(m.width()) * m.height());
}

}  // namespace

std::vector<RegionToken> tokenize_frame(const FrameView& view, const SegmenterBackend& segmenter,
                                        const FeatureBackend& extractor) {
    auto masks = run_segmenter(view, segmenter);
    std::vector<RegionToken> tokens;
    if (masks.empty()) return tokens;
    const FeatureMap fm = run_extractor(view, extractor);
    tokens.reserve(masks.size());
    for (std::size_t i = 0; i < masks.size(); ++i) {
        auto& m = masks[i];
        const BBox box = tight_bbox(m);
        const double frac = area_fraction(m);
        auto pooled = pool_resized(fm, m);
        tokens.push_back({view.frame_index, static_cast<int>(i), box, std::move(m), frac, to_float(pooled)});
    }
    return tokens;
}

VideoTokenSet build_token_set(VideoInfo video, const SegmenterBackend& segmenter, const FeatureBackend& extractor,
                              int threads) {
    video.dim = extractor.depth();
    video.segmenter_id = segmenter.id();
    video.extractor_id = extractor.id();
    const auto n = static_cast<std::size_t>(video.frame_count());
    std::vector<std::vector<RegionToken>> per_frame(n);
    parallel_for(n, threads, [&](std::size_t f) {
        per_frame[f] = tokenize_frame(FrameView::full(static_cast<int>(f), video.width, video.height), segmenter,
                                      extractor);
    });
    TokenSetBuilder builder(std::move(video));
    for (auto& frame_tokens : per_frame)
        for (auto& t : frame_tokens) builder.add(std::move(t));
    return std::move(builder).build();
}

int best_matching_mask(const std::vector<BBox>& mask_boxes, const BBox& box) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t i = 0; i < mask_boxes.size(); ++i) {
        const double iou = box_iou(mask_boxes[i], box);
        if (iou > best_iou) {
            best_iou = iou;
            best = static_cast<int>(i);
        }
    }
    return best;
}

QueryToken tokenize_query(const FrameView& view, const BBox& box, const SegmenterBackend& segmenter,
                          const FeatureBackend& extractor) {
    const BBox clipped = clamp_to_frame(box, view.width, view.height);
    if (!clipped.valid()) throw InputError("query box lies outside the image");
    auto masks = run_segmenter(view, segmenter);
    std::vector<BBox> boxes;
    boxes.reserve(masks.size());
    for (const auto& m : masks) boxes.push_back(tight_bbox(m));
    const int best = best_matching_mask(boxes, clipped);

    QueryToken q;
    q.origin = QueryOrigin::original;
    q.source_frame = view.frame_index;
    q.source_box = box;
    q.sim_to_original = 1.0;
    q.area_fraction = clipped.area() / (static_cast<double>(view.width) * view.height);
    const FeatureMap fm = run_extractor(view, extractor);
    if (best >= 0) {
        q.embedding = to_float(pool_resized(fm, masks[static_cast<std::size_t>(best)]));
    } else {
        const auto x0 = static_cast<int>(std::floor(clipped.x));
        const auto y0 = static_cast<int>(std::floor(clipped.y));
        const auto x1 = static_cast<int>(std::ceil(clipped.right()));
        const auto y1 = static_cast<int>(std::ceil(clipped.bottom()));
        q.embedding = to_float(pool_resized(fm, BinaryMask::from_rect(view.width, view.height, x0, y0, x1, y1)));
        q.box_interior_fallback = true;
    }
    return q;
}

std::optional<QueryToken> query_from_tokens(const VideoTokenSet& tokens, int frame_index, const BBox& box) {
    if (frame_index < 0 || frame_index >= tokens.frame_count()) return std::nullopt;
    const std::size_t begin = tokens.frame_begin(frame_index);
    const std::size_t end = tokens.frame_end(frame_index);
    std::vector<BBox> boxes;
    for (std::size_t i = begin; i < end; ++i) boxes.push_back(tokens.record(i).bbox);
    const BBox clipped = clamp_to_frame(box, tokens.info().width, tokens.info().height);
    const int best = best_matching_mask(boxes, clipped);
    if (best < 0) return std::nullopt;
    const auto e = tokens.embedding(begin + static_cast<std::size_t>(best));
    QueryToken q;
    q.embedding.assign(e.begin(), e.end());
    q.origin = QueryOrigin::original;
    q.source_frame = frame_index;
    q.source_box = box;
    q.area_fraction = clipped.area() / (static_cast<double>(tokens.info().width) * tokens.info().height);
    return q;
}

}  // namespace vqloc

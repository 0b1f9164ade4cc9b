#pragma once

#include <span>
#include <string>
#include <vector>

#include "vqloc/backends.hpp"
#include "vqloc/config.hpp"
#include "vqloc/token_set.hpp"
#include "vqloc/types.hpp"

namespace vqloc {

/// Object-centric crop of a frame, rendered back at the frame's size.
struct CropSpec {
    BBox crop;
    double zoom = 1.0;
    int width = 0;
    int height = 0;

    FrameView view(int frame_index) const { return {frame_index, crop, width, height}; }
};

/// zoom = clamp(occupancy / max(w / W, h / H), 1, zoom_cap); the crop has the frame's
/// aspect ratio, is centred on the box and is shifted back inside the frame if needed.
CropSpec compute_crop(const BBox& box, int frame_width, int frame_height, double zoom_cap, double occupancy);

/// Result of re-tokenizing a view of one box.
struct RefinedView {
    bool ok = false;
    BBox bbox;  // frame coordinates
    std::vector<float> embedding;
    double zoom = 1.0;
    std::string failure;
};

/// Crops around `box`, segments and extracts the crop, and pools the crop mask whose
/// tight box best matches the box. Fails softly (ok = false) when no mask overlaps the
/// box, the backends are missing, or they cannot serve crops.
RefinedView refine_box(int frame_index, const BBox& box, const VideoInfo& video, const Backends& backends,
                       const EngineConfig& config);

struct RefinedCandidate {
    ScoredCandidate original;
    // bbox is the refined box (or the original on failure); score is set by rescoring.
    ScoredCandidate candidate;
    std::vector<float> embedding;
    bool refined = false;
    double zoom = 1.0;
    std::string failure;
};

/// Refines every candidate (in parallel); the output keeps the input order.
std::vector<RefinedCandidate> refine_candidates(std::span<const ScoredCandidate> candidates,
                                                const VideoTokenSet& tokens, const Backends& backends,
                                                const EngineConfig& config);

/// Refined tokens of the queries that carry a source frame and box; failures are skipped.
std::vector<QueryToken> refine_queries(std::span<const QueryToken> queries, const VideoInfo& video,
                                       const Backends& backends, const EngineConfig& config);

/// score = max_j cos(embedding, query_j); candidates scoring below t_sim are dropped.
std::vector<RefinedCandidate> rescore_and_filter(std::vector<RefinedCandidate> candidates,
                                                 std::span<const QueryToken> queries, double t_sim);

}  // namespace vqloc

#pragma once

#include <vector>

#include "vqloc/backends.hpp"
#include "vqloc/token_set.hpp"
#include "vqloc/types.hpp"

namespace vqloc {

/// One token per segmenter mask, in mask order. Each embedding is the mean of the
/// extractor's feature map, bilinearly resized to the mask resolution, over the mask.
/// Backend failures are rethrown as BackendError carrying the frame index.
std::vector<RegionToken> tokenize_frame(const FrameView& view, const SegmenterBackend& segmenter,
                                        const FeatureBackend& extractor);

/// Tokenizes every frame listed in `video` (fanned out over `threads`), ordered by frame.
/// `video.dim` and the segmenter/extractor ids are filled from the backends.
VideoTokenSet build_token_set(VideoInfo video, const SegmenterBackend& segmenter, const FeatureBackend& extractor,
                              int threads = 0);

/// Index of the mask whose tight box has the largest IoU with `box` (lowest index on
/// ties), or -1 when no mask overlaps it.
int best_matching_mask(const std::vector<BBox>& mask_boxes, const BBox& box);

/// Query token for the object inside `box` (view coordinates). Picks the mask whose tight
/// box best matches the box; when none overlaps, pools the box interior and sets
/// `box_interior_fallback`.
QueryToken tokenize_query(const FrameView& view, const BBox& box, const SegmenterBackend& segmenter,
                          const FeatureBackend& extractor);

/// Same association rule as tokenize_query, answered from an existing full-frame
/// tokenization. Returns nullopt when no region of the frame overlaps the box.
std::optional<QueryToken> query_from_tokens(const VideoTokenSet& tokens, int frame_index, const BBox& box);

}  // namespace vqloc

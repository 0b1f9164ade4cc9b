#pragma once

#include <span>
#include <vector>

#include "vqloc/backends.hpp"
#include "vqloc/config.hpp"
#include "vqloc/image.hpp"
#include "vqloc/localize.hpp"
#include "vqloc/token_set.hpp"
#include "vqloc/types.hpp"

namespace vqloc {

/// Population variance of the 3x3 Laplacian [[0,1,0],[1,-4,1],[0,1,0]] over the valid
/// region of a grayscale image. Throws InputError below 3x3.
double laplacian_variance(std::span<const double> gray, int width, int height);
double laplacian_variance(const Image& image);

/// Query tokens from the regions under the track's boxes, keeping those with
/// cos(token, original) >= t_q, box area fraction >= area_min_fraction and (when a frame
/// source is available) Laplacian variance >= blur_var_min.
std::vector<QueryToken> expand_queries(const ResponseTrack& track, const VideoTokenSet& tokens,
                                       const Backends& backends, const QueryToken& original,
                                       const EngineConfig& config);

struct RelocalizeOutcome {
    ResponseTrack track;
    bool updated = false;
    PassResult pass;
};

/// Searches (prev.end, query_time] with the pool and replaces `prev` when the new track
/// scores at least update_ratio * prev.score. No fallback is applied here.
RelocalizeOutcome relocalize(const VideoTokenSet& tokens, const Backends& backends, std::span<const QueryToken> pool,
                             const ResponseTrack& prev, int query_time, const EngineConfig& config,
                             const TrackerBackend& tracker);

}  // namespace vqloc

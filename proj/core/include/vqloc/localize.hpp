#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vqloc/backends.hpp"
#include "vqloc/config.hpp"
#include "vqloc/refine.hpp"
#include "vqloc/search.hpp"
#include "vqloc/token_set.hpp"
#include "vqloc/types.hpp"

namespace vqloc {

/// One search -> refine -> track pass over a frame window.
struct PassResult {
    FrameRange window;
    SearchResult search;
    std::vector<RefinedCandidate> survivors;
    std::optional<ScoredCandidate> seed;
    bool fallback = false;
    std::optional<ResponseTrack> track;
};

/// Runs one pass with the given query pool. With `allow_fallback`, a pass whose
/// candidates are all filtered out is seeded with the best unrefined candidate, or with
/// the best NMS peak when no candidate reached t_sim. The track's seed is the surviving
/// candidate that occurs last.
PassResult run_pass(const VideoTokenSet& tokens, const Backends& backends, std::span<const QueryToken> queries,
                    FrameRange window, const EngineConfig& config, const TrackerBackend& tracker,
                    bool allow_fallback);

/// Tracker used when Backends::tracker is null.
const TrackerBackend& select_tracker(const Backends& backends, const TrackerBackend& builtin);

struct LocalizationResult {
    std::string query_id;
    /// Empty only when no token exists at or before the query time.
    ResponseTrack track;
    std::optional<ResponseTrack> first_pass_track;
    bool updated_by_reiteration = false;
    std::size_t expanded_queries = 0;
    std::vector<std::string> provenance;
};

/// Original query token: tokenized live when a segmenter and extractor exist, otherwise
/// taken from the stored tokenization of the query frame.
QueryToken make_query_token(const LocalizationRequest& request, const VideoTokenSet& tokens,
                            const Backends& backends);

/// Tokenize the query, search, refine, track, expand the query set and reiterate once.
LocalizationResult localize(const LocalizationRequest& request, const VideoTokenSet& tokens,
                            const Backends& backends, const EngineConfig& config);

}  // namespace vqloc

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vqloc/config.hpp"
#include "vqloc/token_set.hpp"
#include "vqloc/types.hpp"

namespace vqloc {

/// Scores of the tokens of a frame range, aligned with the token set's ordering.
struct ScoreTable {
    FrameRange frames;
    std::size_t token_begin = 0;
    std::vector<double> scores;

    double at(std::size_t token_index) const { return scores[token_index - token_begin]; }
};

/// s_i = max_j cos(token_i, query_j) over every token whose frame lies in `frames`
/// (clipped to the video). Throws InputError without queries or on a dimension mismatch,
/// and Error naming the token when a token has zero norm. An empty token set scores to an
/// empty table.
ScoreTable score_tokens(const VideoTokenSet& tokens, std::span<const QueryToken> queries, FrameRange frames,
                        int threads = 0);

/// Best token of each non-empty frame, in frame order. Ties go to the lowest region_id.
std::vector<ScoredCandidate> intra_frame_nms(const ScoreTable& table, const VideoTokenSet& tokens);

struct Peak {
    std::size_t index = 0;
    double score = 0.0;

    friend bool operator==(const Peak&, const Peak&) = default;
};

/// Iterative peak picking over a dense per-frame score sequence. The global maximum is
/// taken (later index on ties), then neighbours on each side are zeroed while their score
/// is at least t_nms times the peak, stopping at the first one below. Repeats while any
/// positive score remains; peaks are returned in selection order.
std::vector<Peak> inter_frame_nms(std::span<const double> scores, double t_nms);

/// Candidates with score >= t_sim, best first (later frame on ties), at most k.
std::vector<ScoredCandidate> select_candidates(std::span<const ScoredCandidate> peaks, int k, double t_sim);

struct SearchResult {
    std::vector<ScoredCandidate> peaks;       // inter-frame NMS output, selection order
    std::vector<ScoredCandidate> candidates;  // select_candidates(peaks)
};

SearchResult search(const VideoTokenSet& tokens, std::span<const QueryToken> queries, FrameRange frames,
                    const EngineConfig& config);

}  // namespace vqloc

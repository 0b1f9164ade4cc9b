#include "vqloc/localize.hpp"

#include <algorithm>
#include <cstdio>

#include "vqloc/error.hpp"
#include "vqloc/reiterate.hpp"
#include "vqloc/tokenizer.hpp"
#include "vqloc/tracker.hpp"

namespace vqloc {
namespace {

std::string fmt_range(FrameRange r) { return "[" + std::to_string(r.first) + ", " + std::to_string(r.last) + "]"; }

std::string fmt_score(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", s);
    return buf;
}

std::string describe(const PassResult& p) {
    std::string s = "search over frames " + fmt_range(p.window) + ": " + std::to_string(p.search.peaks.size()) +
                    " peaks, " + std::to_string(p.search.candidates.size()) + " candidates; " +
                    std::to_string(p.survivors.size()) + " survive refinement";
    if (p.seed) s += "; seed frame " + std::to_string(p.seed->frame_index) + " score " + fmt_score(p.seed->score);
    if (p.fallback) s += " (fallback)";
    if (p.track)
        s += "; track [" + std::to_string(p.track->start()) + ", " + std::to_string(p.track->end()) + "]";
    return s;
}

}  // namespace

const TrackerBackend& select_tracker(const Backends& backends, const TrackerBackend& builtin) {
    return backends.tracker ? *backends.tracker : builtin;
}

PassResult run_pass(const VideoTokenSet& tokens, const Backends& backends, std::span<const QueryToken> queries,
                    FrameRange window, const EngineConfig& config, const TrackerBackend& tracker,
                    bool allow_fallback) {
    PassResult pass;
    pass.window = window;
    pass.search = search(tokens, queries, window, config);
    const auto& candidates = pass.search.candidates;

    if (config.refine && !candidates.empty()) {
        std::vector<QueryToken> pool(queries.begin(), queries.end());
        for (auto& q : refine_queries(queries, tokens.info(), backends, config)) pool.push_back(std::move(q));
        pass.survivors = rescore_and_filter(refine_candidates(candidates, tokens, backends, config), pool,
                                            config.t_sim);
    } else {
        for (const auto& c : candidates) {
            RefinedCandidate r;
            r.original = c;
            r.candidate = c;
            pass.survivors.push_back(std::move(r));
        }
    }

    if (!pass.survivors.empty()) {
        const auto latest = std::max_element(pass.survivors.begin(), pass.survivors.end(),
                                             [](const RefinedCandidate& a, const RefinedCandidate& b) {
                                                 if (a.candidate.frame_index != b.candidate.frame_index)
                                                     return a.candidate.frame_index < b.candidate.frame_index;
                                                 return a.candidate.score < b.candidate.score;
                                             });
        pass.seed = latest->candidate;
    } else if (allow_fallback) {
        if (!candidates.empty()) pass.seed = candidates.front();
        else if (!pass.search.peaks.empty()) pass.seed = pass.search.peaks.front();
        pass.fallback = pass.seed.has_value();
    }
    if (!pass.seed) return pass;

    TrackSeed seed;
    seed.frame_index = pass.seed->frame_index;
    seed.bbox = pass.seed->bbox;
    seed.score = pass.seed->score;
    seed.token_index = pass.seed->token_index;
    const auto e = tokens.embedding(seed.token_index);
    seed.embedding.assign(e.begin(), e.end());
    pass.track = track_bidirectional(seed, tracker, window);
    return pass;
}

QueryToken make_query_token(const LocalizationRequest& request, const VideoTokenSet& tokens,
                            const Backends& backends) {
    const VideoInfo& info = tokens.info();
    if (request.query_frame < 0 || request.query_frame >= info.frame_count())
        throw InputError("query " + request.query_id + ": query frame " + std::to_string(request.query_frame) +
                         " outside the video");
    if (backends.segmenter && backends.extractor) {
        try {
            return tokenize_query(FrameView::full(request.query_frame, info.width, info.height), request.query_box,
                                  *backends.segmenter, *backends.extractor);
        } catch (const UnsupportedViewError&) {
        }
    }
    auto q = query_from_tokens(tokens, request.query_frame, request.query_box);
    if (!q)
        throw InputError("query " + request.query_id + ": no region of frame " + std::to_string(request.query_frame) +
                         " overlaps the query box");
    return *q;
}

LocalizationResult localize(const LocalizationRequest& request, const VideoTokenSet& tokens,
                            const Backends& backends, const EngineConfig& config) {
    validate(config);
    const VideoInfo& info = tokens.info();
    if (request.query_time < 0 || request.query_time >= info.frame_count())
        throw InputError("query " + request.query_id + ": query time " + std::to_string(request.query_time) +
                         " outside the video's " + std::to_string(info.frame_count()) + " frames");

    LocalizationResult result;
    result.query_id = request.query_id;
    const QueryToken original = make_query_token(request, tokens, backends);
    result.provenance.push_back(std::string("query token from frame ") + std::to_string(request.query_frame) +
                                (original.box_interior_fallback ? " (box interior)" : ""));

    const GreedyTokenTracker builtin(tokens, config);
    const TrackerBackend& tracker = select_tracker(backends, builtin);
    const std::vector<QueryToken> queries{original};
    const PassResult first = run_pass(tokens, backends, queries, {0, request.query_time}, config, tracker, true);
    result.provenance.push_back("pass 1: " + describe(first));
    if (!first.track) return result;
    result.track = *first.track;
    result.first_pass_track = *first.track;

    if (!config.reiterate) return result;
    std::vector<QueryToken> pool{original};
    for (auto& q : expand_queries(*first.track, tokens, backends, original, config)) pool.push_back(std::move(q));
    result.expanded_queries = pool.size() - 1;
    result.provenance.push_back("expanded queries: " + std::to_string(result.expanded_queries));
    const RelocalizeOutcome again =
        relocalize(tokens, backends, pool, *first.track, request.query_time, config, tracker);
    result.provenance.push_back("pass 2: " + describe(again.pass) + (again.updated ? "; updated" : "; kept"));
    result.track = again.track;
    result.updated_by_reiteration = again.updated;
    return result;
}

}  // namespace vqloc

#include "vqloc/search.hpp"

#include <algorithm>
#include <cmath>

#include "vqloc/error.hpp"
#include "vqloc/parallel.hpp"
#include "vqloc/vector_math.hpp"

namespace vqloc {

ScoreTable score_tokens(const VideoTokenSet& tokens, std::span<const QueryToken> queries, FrameRange frames,
                        int threads) {
    if (queries.empty()) throw InputError("scoring needs at least one query token");
    if (tokens.empty()) return ScoreTable{{0, -1}, 0, {}};
    const auto d = static_cast<std::size_t>(tokens.dim());

    // unit queries in double, laid out contiguously
    std::vector<double> unit(queries.size() * d);
    for (std::size_t j = 0; j < queries.size(); ++j) {
        const auto& q = queries[j].embedding;
        if (q.size() != d)
            throw InputError("query token " + std::to_string(j) + " has dimension " + std::to_string(q.size()) +
                             ", token set has " + std::to_string(d));
        const double n = norm(q);
        if (n == 0.0) throw InputError("query token " + std::to_string(j) + " has a zero-norm embedding");
        for (std::size_t c = 0; c < d; ++c) unit[j * d + c] = q[c] / n;
    }

    ScoreTable table;
    table.frames = {std::max(frames.first, 0), std::min(frames.last, tokens.frame_count() - 1)};
    if (table.frames.empty()) {
        table.frames = {0, -1};
        return table;
    }
    table.token_begin = tokens.frame_begin(table.frames.first);
    const std::size_t token_end = tokens.frame_end(table.frames.last);
    table.scores.assign(token_end - table.token_begin, 0.0);

    const auto n_frames = static_cast<std::size_t>(table.frames.size());
    parallel_for(n_frames, threads, [&](std::size_t f) {
        const int frame = table.frames.first + static_cast<int>(f);
        for (std::size_t i = tokens.frame_begin(frame); i < tokens.frame_end(frame); ++i) {
            const double n = tokens.embedding_norm(i);
            if (n == 0.0) {
                const auto& r = tokens.record(i);
                throw Error("token " + std::to_string(i) + " (frame " + std::to_string(r.frame_index) + ", region " +
                            std::to_string(r.region_id) + ") has a zero-norm embedding");
            }
            const float* e = tokens.embedding(i).data();
            double best = -INFINITY;
            for (std::size_t j = 0; j < queries.size(); ++j) {
                const double* q = unit.data() + j * d;
                double s = 0.0;
                for (std::size_t c = 0; c < d; ++c) s += static_cast<double>(e[c]) * q[c];
                best = std::max(best, s);
            }
            table.scores[i - table.token_begin] = std::clamp(best / n, -1.0, 1.0);
        }
    });
    return table;
}

std::vector<ScoredCandidate> intra_frame_nms(const ScoreTable& table, const VideoTokenSet& tokens) {
    std::vector<ScoredCandidate> out;
    if (table.frames.empty()) return out;
    for (int f = table.frames.first; f <= table.frames.last; ++f) {
        const std::size_t begin = tokens.frame_begin(f);
        const std::size_t end = tokens.frame_end(f);
        if (begin == end) continue;
        std::size_t best = begin;
        for (std::size_t i = begin + 1; i < end; ++i) {
            const double s = table.at(i);
            const double b = table.at(best);
            if (s > b || (s == b && tokens.record(i).region_id < tokens.record(best).region_id)) best = i;
        }
        const auto& r = tokens.record(best);
        out.push_back({best, r.frame_index, r.region_id, r.bbox, table.at(best)});
    }
    return out;
}

std::vector<Peak> inter_frame_nms(std::span<const double> scores, double t_nms) {
    if (!(t_nms > 0.0 && t_nms < 1.0)) throw InputError("t_nms must lie in (0, 1)");
    std::vector<double> s(scores.begin(), scores.end());
    for (double& v : s)
        if (!(v > 0.0)) v = 0.0;
    std::vector<Peak> peaks;
    const std::size_t n = s.size();
    while (true) {
        std::size_t p = n;
        for (std::size_t i = 0; i < n; ++i)
            if (s[i] > 0.0 && (p == n || s[i] >= s[p])) p = i;
        if (p == n) break;
        const double peak = s[p];
        const double bound = t_nms * peak;
        peaks.push_back({p, peak});
        s[p] = 0.0;
        for (std::size_t i = p + 1; i < n && s[i] >= bound; ++i) s[i] = 0.0;
        for (std::size_t i = p; i-- > 0 && s[i] >= bound;) s[i] = 0.0;
    }
    return peaks;
}

std::vector<ScoredCandidate> select_candidates(std::span<const ScoredCandidate> peaks, int k, double t_sim) {
    std::vector<ScoredCandidate> out;
    for (const auto& p : peaks)
        if (p.score >= t_sim) out.push_back(p);
    std::stable_sort(out.begin(), out.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.frame_index > b.frame_index;
    });
    if (out.size() > static_cast<std::size_t>(std::max(k, 0))) out.resize(static_cast<std::size_t>(std::max(k, 0)));
    return out;
}

SearchResult search(const VideoTokenSet& tokens, std::span<const QueryToken> queries, FrameRange frames,
                    const EngineConfig& config) {
    SearchResult result;
    const ScoreTable table = score_tokens(tokens, queries, frames, config.threads);
    if (table.frames.empty()) return result;
    const auto best = intra_frame_nms(table, tokens);

    std::vector<double> dense(static_cast<std::size_t>(table.frames.size()), 0.0);
    std::vector<const ScoredCandidate*> by_frame(dense.size(), nullptr);
    for (const auto& c : best) {
        const auto slot = static_cast<std::size_t>(c.frame_index - table.frames.first);
        dense[slot] = c.score;
        by_frame[slot] = &c;
    }
    for (const auto& p : inter_frame_nms(dense, config.t_nms)) result.peaks.push_back(*by_frame[p.index]);
    result.candidates = select_candidates(result.peaks, config.k, config.t_sim);
    return result;
}

}  // namespace vqloc

#include "vqloc/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "vqloc/error.hpp"
#include "vqloc/vector_math.hpp"

namespace vqloc {

GreedyTokenTracker::GreedyTokenTracker(const VideoTokenSet& tokens, double w_sim, double w_iou, double stop_threshold)
    : tokens_(tokens), w_sim_(w_sim), w_iou_(w_iou), stop_(stop_threshold) {}

std::vector<FrameBox> GreedyTokenTracker::track(const TrackSeed& seed, TrackDirection direction,
                                                int limit_frame) const {
    std::vector<FrameBox> out;
    if (seed.frame_index < 0 || seed.frame_index >= tokens_.frame_count()) return out;
    const int step = direction == TrackDirection::forward ? 1 : -1;
    if ((limit_frame - seed.frame_index) * step < 0) return out;

    std::span<const float> reference(seed.embedding);
    BBox prev = seed.bbox;
    if (seed.token_index < tokens_.size() && tokens_.record(seed.token_index).frame_index == seed.frame_index) {
        reference = tokens_.embedding(seed.token_index);
        prev = tokens_.record(seed.token_index).bbox;
    }
    if (reference.size() != static_cast<std::size_t>(tokens_.dim()))
        throw InputError("track seed embedding does not match the token set dimension");
    out.push_back({seed.frame_index, prev});

    for (int f = seed.frame_index + step; f >= 0 && f < tokens_.frame_count() && (limit_frame - f) * step >= 0;
         f += step) {
        double best = -INFINITY;
        std::size_t best_i = 0;
        for (std::size_t i = tokens_.frame_begin(f); i < tokens_.frame_end(f); ++i) {
            const double s = w_sim_ * cosine(tokens_.embedding(i), reference) + w_iou_ * box_iou(tokens_.record(i).bbox, prev);
            if (s > best) {
                best = s;
                best_i = i;
            }
        }
        if (!(best >= stop_)) break;
        prev = tokens_.record(best_i).bbox;
        out.push_back({f, prev});
    }
    return out;
}

std::vector<FrameBox> builtin_greedy_track(const TrackSeed& seed, const VideoTokenSet& tokens,
                                           const EngineConfig& config, TrackDirection direction, int limit_frame) {
    return GreedyTokenTracker(tokens, config).track(seed, direction, limit_frame);
}

namespace {

// Keeps the leading run of boxes that step by `step` from `start` and stay in the window.
std::vector<FrameBox> contiguous_prefix(const std::vector<FrameBox>& boxes, int start, int step, FrameRange window) {
    std::vector<FrameBox> out;
    int expected = start;
    for (const auto& fb : boxes) {
        if (fb.frame != expected || !window.contains(fb.frame) || !fb.box.valid()) break;
        out.push_back(fb);
        expected += step;
    }
    return out;
}

}  // namespace

ResponseTrack track_bidirectional(const TrackSeed& seed, const TrackerBackend& tracker, FrameRange window) {
    if (!window.contains(seed.frame_index))
        throw InputError("track seed frame " + std::to_string(seed.frame_index) + " lies outside the search window");
    const auto forward = contiguous_prefix(tracker.track(seed, TrackDirection::forward, window.last),
                                           seed.frame_index, 1, window);
    const auto backward = contiguous_prefix(tracker.track(seed, TrackDirection::backward, window.first),
                                            seed.frame_index, -1, window);
    ResponseTrack track;
    track.score = seed.score;
    for (std::size_t i = backward.size(); i-- > 1;) track.boxes.push_back(backward[i]);
    if (!forward.empty()) track.boxes.push_back(forward.front());
    else if (!backward.empty()) track.boxes.push_back(backward.front());
    else track.boxes.push_back({seed.frame_index, seed.bbox});
    for (std::size_t i = 1; i < forward.size(); ++i) track.boxes.push_back(forward[i]);
    return track;
}

}  // namespace vqloc

#pragma once

#include <vector>

#include "vqloc/backends.hpp"
#include "vqloc/config.hpp"
#include "vqloc/token_set.hpp"
#include "vqloc/types.hpp"

namespace vqloc {

/// Greedy single-hypothesis tracking in token space.
///
/// The seed frame is re-associated to the seed token's box. Each step moves to the
/// adjacent frame and takes the token maximizing
/// w_sim * cos(token, seed token) + w_iou * iou(token box, previous box); tracking stops
/// when that maximum falls below stop_threshold or the frame has no tokens.
class GreedyTokenTracker final : public TrackerBackend {
public:
    GreedyTokenTracker(const VideoTokenSet& tokens, double w_sim, double w_iou, double stop_threshold);
    GreedyTokenTracker(const VideoTokenSet& tokens, const EngineConfig& config)
        : GreedyTokenTracker(tokens, config.w_sim, config.w_iou, config.stop_threshold) {}

    std::string id() const override { return "builtin-greedy"; }
    std::vector<FrameBox> track(const TrackSeed& seed, TrackDirection direction, int limit_frame) const override;

private:
    const VideoTokenSet& tokens_;
    double w_sim_;
    double w_iou_;
    double stop_;
};

/// Boxes from the seed onwards in one direction, as GreedyTokenTracker produces them.
std::vector<FrameBox> builtin_greedy_track(const TrackSeed& seed, const VideoTokenSet& tokens,
                                           const EngineConfig& config, TrackDirection direction, int limit_frame);

/// Runs the tracker backwards (down to window.first) and forwards (up to window.last)
/// from the seed and joins both passes into one contiguous track scored with the seed's
/// score. A tracker that returns nothing leaves a single-frame track at the seed.
ResponseTrack track_bidirectional(const TrackSeed& seed, const TrackerBackend& tracker, FrameRange window);

}  // namespace vqloc

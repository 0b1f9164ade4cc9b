#pragma once

#include <memory>
#include <string>
#include <vector>

#include "vqloc/feature_map.hpp"
#include "vqloc/image.hpp"
#include "vqloc/mask.hpp"
#include "vqloc/types.hpp"

namespace vqloc {

// All backends are pure functions of their input plus immutable state and must be
// callable from several threads at once.

/// Provides the pixels of a video's sampled frames.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual const VideoInfo& info() const = 0;
    virtual Image render(const FrameView& view) const = 0;
};

/// Produces one binary mask per region of a view. Masks have the view's dimensions.
class SegmenterBackend {
public:
    virtual ~SegmenterBackend() = default;
    virtual std::string id() const = 0;
    virtual std::vector<BinaryMask> segment(const FrameView& view) const = 0;
};

/// Produces a dense feature map for a view, at the extractor's own resolution.
class FeatureBackend {
public:
    virtual ~FeatureBackend() = default;
    virtual std::string id() const = 0;
    virtual int depth() const = 0;
    virtual FeatureMap extract(const FrameView& view) const = 0;
};

/// Follows a seeded object through neighbouring frames.
class TrackerBackend {
public:
    virtual ~TrackerBackend() = default;
    virtual std::string id() const = 0;
    /// Boxes on consecutive frames starting at the seed frame and moving in `direction`,
    /// never beyond `limit_frame` (inclusive). May be empty if the object is lost at once.
    virtual std::vector<FrameBox> track(const TrackSeed& seed, TrackDirection direction, int limit_frame) const = 0;
};

/// The backends a localization run draws on. A null tracker selects the builtin
/// greedy token tracker; a null frame source disables pixel-based filters.
struct Backends {
    std::shared_ptr<const FrameSource> frames;
    std::shared_ptr<const SegmenterBackend> segmenter;
    std::shared_ptr<const FeatureBackend> extractor;
    std::shared_ptr<const TrackerBackend> tracker;
};

}  // namespace vqloc

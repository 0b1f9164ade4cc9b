#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vqloc/geometry.hpp"
#include "vqloc/mask.hpp"

namespace vqloc {

/// One entry of the sampled-frame sequence; `source_index` is the frame number in the
/// original video and `file` the image name relative to the video directory.
struct FrameEntry {
    int index = 0;
    int source_index = 0;
    std::string file;

    friend bool operator==(const FrameEntry&, const FrameEntry&) = default;
};

/// Per-video metadata shared by every frame of a token set.
struct VideoInfo {
    std::string video_id;
    double fps = 5.0;
    int width = 0;
    int height = 0;
    int dim = 0;
    std::string extractor_id;
    std::string segmenter_id;
    std::vector<FrameEntry> frames;
    /// Directory holding the frame images (and synthetic scenario), relative to the
    /// token store directory when persisted. May be empty.
    std::string source_dir;

    int frame_count() const noexcept { return static_cast<int>(frames.size()); }

    friend bool operator==(const VideoInfo&, const VideoInfo&) = default;
};

struct FrameRef {
    std::string video_id;
    int frame_index = 0;
    int width = 0;
    int height = 0;
};

/// A region of a sampled frame rendered at `width` x `height`.
///
/// The full frame is the view whose crop covers the frame at the frame's own size; a
/// zoomed crop keeps the frame's output size and a smaller crop rectangle.
struct FrameView {
    int frame_index = 0;
    BBox crop;
    int width = 0;
    int height = 0;

    static FrameView full(int frame_index, int width, int height) {
        return {frame_index, {0.0, 0.0, static_cast<double>(width), static_cast<double>(height)}, width, height};
    }

    double zoom_x() const noexcept { return width / crop.w; }
    double zoom_y() const noexcept { return height / crop.h; }
    bool is_full_frame(int frame_width, int frame_height) const noexcept {
        return crop.x == 0.0 && crop.y == 0.0 && crop.w == frame_width && crop.h == frame_height &&
               width == frame_width && height == frame_height;
    }

    BBox to_view(const BBox& b) const noexcept {
        return {(b.x - crop.x) * zoom_x(), (b.y - crop.y) * zoom_y(), b.w * zoom_x(), b.h * zoom_y()};
    }
    BBox to_source(const BBox& b) const noexcept {
        return {crop.x + b.x / zoom_x(), crop.y + b.y / zoom_y(), b.w / zoom_x(), b.h / zoom_y()};
    }
};

/// One segmented region of one frame with its pooled embedding.
struct RegionToken {
    int frame_index = 0;
    int region_id = 0;
    BBox bbox;
    BinaryMask mask;
    double area_fraction = 0.0;
    std::vector<float> embedding;
};

enum class QueryOrigin { original, expanded };

struct QueryToken {
    std::vector<float> embedding;
    QueryOrigin origin = QueryOrigin::original;
    std::optional<int> source_frame;
    std::optional<BBox> source_box;
    double sim_to_original = 1.0;
    double area_fraction = 0.0;
    double blur_variance = 0.0;
    /// No segment overlapped the requested box; the box interior was pooled instead.
    bool box_interior_fallback = false;
};

/// A token of a VideoTokenSet paired with its similarity to the query pool.
struct ScoredCandidate {
    std::size_t token_index = 0;
    int frame_index = 0;
    int region_id = 0;
    BBox bbox;
    double score = 0.0;
};

struct FrameBox {
    int frame = 0;
    BBox box;

    friend bool operator==(const FrameBox&, const FrameBox&) = default;
};

/// Boxes on consecutive frames s, s+1, ..., e with a confidence score.
struct ResponseTrack {
    std::vector<FrameBox> boxes;
    double score = 0.0;

    bool empty() const noexcept { return boxes.empty(); }
    std::size_t size() const noexcept { return boxes.size(); }
    int start() const { return boxes.front().frame; }
    int end() const { return boxes.back().frame; }
    bool is_contiguous() const noexcept {
        for (std::size_t i = 1; i < boxes.size(); ++i)
            if (boxes[i].frame != boxes[i - 1].frame + 1) return false;
        return true;
    }
    const FrameBox* find(int frame) const noexcept {
        if (boxes.empty() || frame < start() || frame > end()) return nullptr;
        const auto& fb = boxes[static_cast<std::size_t>(frame - start())];
        return fb.frame == frame ? &fb : nullptr;
    }

    friend bool operator==(const ResponseTrack&, const ResponseTrack&) = default;
};

struct LocalizationRequest {
    std::string query_id;
    std::string video_id;
    int query_frame = 0;
    BBox query_box;
    int query_time = 0;
};

/// Inclusive range of sampled-frame indices.
struct FrameRange {
    int first = 0;
    int last = -1;

    bool empty() const noexcept { return last < first; }
    bool contains(int f) const noexcept { return f >= first && f <= last; }
    int size() const noexcept { return empty() ? 0 : last - first + 1; }
};

enum class TrackDirection { forward, backward };

/// Starting point handed to a tracker.
struct TrackSeed {
    int frame_index = 0;
    BBox bbox;
    double score = 0.0;
    std::size_t token_index = 0;
    std::vector<float> embedding;
};

}  // namespace vqloc

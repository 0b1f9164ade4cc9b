#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vqloc/mask.hpp"
#include "vqloc/types.hpp"

namespace vqloc {

/// Region metadata of one token; the embedding lives in the set's contiguous block.
struct RegionRecord {
    int frame_index = 0;
    int region_id = 0;
    BBox bbox;
    BinaryMask mask;
    double area_fraction = 0.0;

    friend bool operator==(const RegionRecord&, const RegionRecord&) = default;
};

/// Immutable searchable collection of every region token of one video.
///
/// Tokens are ordered by (frame_index, region_id). Embeddings are stored row-major in
/// a single float block together with their precomputed norms.
class VideoTokenSet {
public:
    VideoTokenSet() = default;

    /// Validates ordering, dimensions and finiteness; throws FormatError on violation.
    VideoTokenSet(VideoInfo info, std::vector<RegionRecord> records, std::vector<float> embeddings);

    const VideoInfo& info() const noexcept { return info_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    int dim() const noexcept { return info_.dim; }
    int frame_count() const noexcept { return info_.frame_count(); }

    const RegionRecord& record(std::size_t i) const noexcept { return records_[i]; }
    const std::vector<RegionRecord>& records() const noexcept { return records_; }
    std::span<const float> embedding(std::size_t i) const noexcept {
        return {embeddings_.data() + i * static_cast<std::size_t>(info_.dim), static_cast<std::size_t>(info_.dim)};
    }
    const std::vector<float>& embeddings() const noexcept { return embeddings_; }
    double embedding_norm(std::size_t i) const noexcept { return norms_[i]; }

    /// Token indices [begin, end) of one frame.
    std::size_t frame_begin(int frame) const noexcept { return frame_offsets_[static_cast<std::size_t>(frame)]; }
    std::size_t frame_end(int frame) const noexcept { return frame_offsets_[static_cast<std::size_t>(frame) + 1]; }
    std::size_t frame_size(int frame) const noexcept { return frame_end(frame) - frame_begin(frame); }

    FrameRef frame(int frame_index) const { return {info_.video_id, frame_index, info_.width, info_.height}; }
    RegionToken token(std::size_t i) const;

private:
    VideoInfo info_;
    std::vector<RegionRecord> records_;
    std::vector<float> embeddings_;
    std::vector<double> norms_;
    std::vector<std::size_t> frame_offsets_;
};

/// Assembles a token set frame by frame.
class TokenSetBuilder {
public:
    explicit TokenSetBuilder(VideoInfo info) : info_(std::move(info)) {}

    /// Tokens are appended in the given order; frames must be added in increasing order.
    void add(RegionToken token);
    VideoTokenSet build() &&;

private:
    VideoInfo info_;
    std::vector<RegionRecord> records_;
    std::vector<float> embeddings_;
};

}  // namespace vqloc

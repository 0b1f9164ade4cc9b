#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vqloc/backends.hpp"
#include "vqloc/token_set.hpp"

namespace vqloc {

/// Raw feature map file: "FMAP", then uint32 h, w, d and h*w*d float32, all little-endian.
void write_feature_map(const std::filesystem::path& path, const FeatureMap& fm);
FeatureMap read_feature_map(const std::filesystem::path& path);

/// One tracked segment of tracks.jsonl.
struct RecordedTrack {
    int seed_frame = 0;
    TrackDirection direction = TrackDirection::forward;
    std::vector<FrameBox> boxes;
};

std::vector<RecordedTrack> read_tracks(const std::filesystem::path& path);
void write_tracks(const std::filesystem::path& path, const std::vector<RecordedTrack>& tracks);

/// Serves the stored masks of full frames. Crops cannot be answered from a store and
/// raise UnsupportedViewError.
class StoredMaskSegmenter final : public SegmenterBackend {
public:
    explicit StoredMaskSegmenter(std::shared_ptr<const VideoTokenSet> tokens) : tokens_(std::move(tokens)) {}
    std::string id() const override { return tokens_->info().segmenter_id; }
    std::vector<BinaryMask> segment(const FrameView& view) const override;

private:
    std::shared_ptr<const VideoTokenSet> tokens_;
};

/// Serves exported full-frame feature maps from features/frame_NNNNNN.fmap.
class StoredFeatureBackend final : public FeatureBackend {
public:
    StoredFeatureBackend(VideoInfo info, std::filesystem::path features_dir);
    std::string id() const override { return info_.extractor_id; }
    int depth() const override { return info_.dim; }
    FeatureMap extract(const FrameView& view) const override;

private:
    VideoInfo info_;
    std::filesystem::path dir_;
};

/// Replays tracks.jsonl. A seed without a matching record yields no continuation.
class RecordedTracker final : public TrackerBackend {
public:
    explicit RecordedTracker(std::vector<RecordedTrack> tracks);
    std::string id() const override { return "recorded-tracks"; }
    std::vector<FrameBox> track(const TrackSeed& seed, TrackDirection direction, int limit_frame) const override;

private:
    std::multimap<int, RecordedTrack> by_seed_;
};

/// Frame images addressed by the manifest's frame listing.
class PngFrameSource final : public FrameSource {
public:
    PngFrameSource(VideoInfo info, std::filesystem::path dir) : info_(std::move(info)), dir_(std::move(dir)) {}
    const VideoInfo& info() const override { return info_; }
    Image render(const FrameView& view) const override;

private:
    VideoInfo info_;
    std::filesystem::path dir_;
};

std::string feature_map_file(int frame_index);

struct BridgeArtifacts {
    std::shared_ptr<const VideoTokenSet> tokens;
    /// Each member is null when the corresponding artifact is absent.
    Backends backends;
};

/// Loads a store written by the model bridge (or by save_token_store) together with
/// whatever optional artifacts sit next to it: features/, tracks.jsonl and the frame
/// images under the manifest's source_dir.
BridgeArtifacts bridge_read(const std::filesystem::path& store_dir);

}  // namespace vqloc

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vqloc/backends.hpp"
#include "vqloc/types.hpp"

namespace vqloc {

/// Scenario families used as test oracles.
///
///  clean        targets seen one to three times with a fixed view; orthogonal distractors.
///  reappearance the target's view rotates during its first appearance and its final
///               appearance is too far from the query view to be found by the query alone.
///  bleed        a large target plus small late decoys on a background that resembles the
///               query, so that feature bleed lifts the decoys above threshold.
enum class ScenarioKind { clean, reappearance, bleed };

struct SyntheticParams {
    ScenarioKind kind = ScenarioKind::clean;
    int frame_count = 60;
    int width = 320;
    int height = 240;
    int dim = 64;
    int feature_stride = 8;
    int targets = 1;
    int distractors = 3;
    int decoys = 0;
    // Per-frame perturbation magnitude; cos(base, embedding) >= 1 - noise^2 / 2.
    double noise = 0.0;
    bool background_mask = true;
    // Cosine between the background vector and the first target's base.
    double background_query_affinity = 0.0;
    double decoy_similarity = 0.3;
    int slot_size = 80;
    double fps = 5.0;

    /// Tuned defaults of each family.
    static SyntheticParams preset(ScenarioKind kind);
};

enum class ObjectRole { target, distractor, decoy };

struct Appearance {
    int start = 0;
    int end = 0;  // inclusive
    BBox box;     // at `start`, integer-aligned
    double vx = 0.0;
    double vy = 0.0;
    // The view direction is interpolated along the great circle from view_from to view_to.
    std::vector<double> view_from;
    std::vector<double> view_to;
    bool textured = true;

    bool visible(int frame) const noexcept { return frame >= start && frame <= end; }
    BBox box_at(int frame) const;
};

struct SceneObject {
    int object_id = 0;
    ObjectRole role = ObjectRole::distractor;
    std::vector<double> base;
    std::vector<Appearance> appearances;
    // Sub-rectangle (fractions of the object box) that a segmenter reports on its own
    // while the object is smaller than SyntheticScenario::part_merge_px in the view.
    std::optional<BBox> part;
};

struct SyntheticQuery {
    std::string query_id;
    int object_id = 0;
    int query_frame = 0;
    BBox query_box;
    int query_time = 0;
    ResponseTrack ground_truth;
};

struct SyntheticScenario {
    std::uint64_t seed = 0;
    SyntheticParams params;
    std::vector<SceneObject> objects;
    std::vector<double> background;
    std::vector<SyntheticQuery> queries;
    int part_merge_px = 24;

    std::string video_id() const { return "synth-" + std::to_string(seed); }
    VideoInfo video_info() const;

    /// Unit embedding of an object at a frame of one of its appearances.
    std::vector<double> embedding_at(const SceneObject& object, const Appearance& appearance, int frame) const;

    /// Region tokens a full-frame tokenization of the scenario produces.
    std::size_t planted_region_count() const;
};

/// Deterministic in (seed, params). Throws InputError for unusable params.
SyntheticScenario generate_scenario(std::uint64_t seed, const SyntheticParams& params);

/// Latest appearance of `object` starting at or before `query_time`, truncated at
/// `query_time`; empty when the object has not appeared yet.
ResponseTrack latest_occurrence(const SceneObject& object, int query_time);

std::string scenario_to_json(const SyntheticScenario& scenario);
SyntheticScenario scenario_from_json(std::string_view text);
SyntheticParams params_from_json(std::string_view text);
std::string params_to_json(const SyntheticParams& params);

/// Precomputed per-frame placements of a scenario; shared by the synthetic backends.
class SyntheticWorld {
public:
    struct Placement {
        int object_id = 0;
        ObjectRole role = ObjectRole::distractor;
        BBox box;
        std::optional<BBox> part_box;
        std::vector<double> embedding;
        bool textured = true;
        Rgb color_a{};
        Rgb color_b{};
    };

    explicit SyntheticWorld(SyntheticScenario scenario);

    const SyntheticScenario& scenario() const noexcept { return scenario_; }
    const VideoInfo& info() const noexcept { return info_; }
    const std::vector<Placement>& placements(int frame) const;

private:
    SyntheticScenario scenario_;
    VideoInfo info_;
    std::vector<std::vector<Placement>> frames_;
};

class SyntheticFrameSource final : public FrameSource {
public:
    explicit SyntheticFrameSource(std::shared_ptr<const SyntheticWorld> world) : world_(std::move(world)) {}
    const VideoInfo& info() const override { return world_->info(); }
    Image render(const FrameView& view) const override;

private:
    std::shared_ptr<const SyntheticWorld> world_;
};

/// Masks are the planted rectangles rasterized by pixel centre (one per visible object,
/// in object order) followed by an optional background mask covering the remainder.
class SyntheticSegmenter final : public SegmenterBackend {
public:
    explicit SyntheticSegmenter(std::shared_ptr<const SyntheticWorld> world) : world_(std::move(world)) {}
    std::string id() const override { return "synthetic-segmenter"; }
    std::vector<BinaryMask> segment(const FrameView& view) const override;

private:
    std::shared_ptr<const SyntheticWorld> world_;
};

/// Feature cells of `stride` view pixels carry the supersampled average of the embedding
/// field: an object's embedding inside it, the background vector elsewhere.
class SyntheticExtractor final : public FeatureBackend {
public:
    SyntheticExtractor(std::shared_ptr<const SyntheticWorld> world, int stride);
    std::string id() const override { return "synthetic-extractor/s" + std::to_string(stride_); }
    int depth() const override;
    FeatureMap extract(const FrameView& view) const override;

private:
    std::shared_ptr<const SyntheticWorld> world_;
    int stride_;
};

/// Frame source, segmenter and extractor over one scenario; tracker left to the builtin.
Backends make_synthetic_backends(std::shared_ptr<const SyntheticWorld> world, int feature_stride);
Backends make_synthetic_backends(std::shared_ptr<const SyntheticWorld> world);

}  // namespace vqloc

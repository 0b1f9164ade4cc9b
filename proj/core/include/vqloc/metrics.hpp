#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vqloc/types.hpp"

namespace vqloc {

/// IoU of the inclusive frame spans; 0 when either track is empty.
double temporal_iou(const ResponseTrack& a, const ResponseTrack& b);

/// Tube IoU: per-frame intersections over per-frame unions, summed over every frame of
/// either track.
double st_iou(const ResponseTrack& a, const ResponseTrack& b);

using OverlapFn = std::function<double(const ResponseTrack&, const ResponseTrack&)>;

struct ScoredPrediction {
    std::size_t query = 0;  // index into the ground-truth list
    double score = 0.0;
    ResponseTrack track;
};

/// All-point interpolated AP. Predictions are ranked by score (ties: query order, then
/// input order); a prediction is a true positive when its overlap reaches `threshold` and
/// its query's ground truth is still unmatched. Recall is relative to gts.size().
double average_precision(std::span<const ScoredPrediction> predictions, std::span<const ResponseTrack> gts,
                         const OverlapFn& overlap, double threshold = 0.25);

/// st_iou(pred, gt) > 0.05, or temporal_iou when `temporal` is set.
bool success(const ResponseTrack& pred, const ResponseTrack& gt, bool temporal = false);

/// Percentage of predicted frames whose box has IoU >= 0.5 with the ground truth box.
double recovery(const ResponseTrack& pred, const ResponseTrack& gt);

struct Annotation {
    std::string query_id;
    std::string video_id;
    int query_frame = 0;
    BBox query_box;
    int query_time = 0;
    ResponseTrack gt_track;

    LocalizationRequest request() const { return {query_id, video_id, query_frame, query_box, query_time}; }
};

struct QueryResult {
    std::string query_id;
    double score = 0.0;
    ResponseTrack track;
};

struct Report {
    double stap25 = 0.0;
    double tap25 = 0.0;
    double success = 0.0;   // percent
    double recovery = 0.0;  // percent
};

struct EvaluateOptions {
    double threshold = 0.25;
    bool temporal_success = false;
};

/// Queries without a result count as failures. Throws InputError for results naming an
/// unknown or repeated query id.
Report evaluate(std::span<const QueryResult> results, std::span<const Annotation> annotations,
                const EvaluateOptions& options = {});

std::vector<Annotation> parse_annotations(std::string_view text);
std::string annotations_to_json(std::span<const Annotation> annotations);
std::vector<QueryResult> parse_results(std::string_view text);
std::string results_to_json(std::span<const QueryResult> results);
/// Values rounded to three decimals.
std::string report_to_json(const Report& report);

}  // namespace vqloc

#include "vqloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "vqloc/error.hpp"

namespace vqloc {
using json = nlohmann::ordered_json;

double temporal_iou(const ResponseTrack& a, const ResponseTrack& b) {
    if (a.empty() || b.empty()) return 0.0;
    const int inter = std::min(a.end(), b.end()) - std::max(a.start(), b.start()) + 1;
    const int uni = std::max(a.end(), b.end()) - std::min(a.start(), b.start()) + 1;
    if (inter <= 0) return 0.0;
    return static_cast<double>(inter) / uni;
}

double st_iou(const ResponseTrack& a, const ResponseTrack& b) {
    std::map<int, std::pair<const BBox*, const BBox*>> frames;
    for (const auto& fb : a.boxes) frames[fb.frame].first = &fb.box;
    for (const auto& fb : b.boxes) frames[fb.frame].second = &fb.box;
    double inter = 0.0;
    double uni = 0.0;
    for (const auto& [frame, boxes] : frames) {
        const auto [pa, pb] = boxes;
        if (pa && pb) {
            const double i = intersection_area(*pa, *pb);
            inter += i;
            uni += pa->area() + pb->area() - i;
        } else {
            uni += (pa ? pa : pb)->area();
        }
    }
    return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

double average_precision(std::span<const ScoredPrediction> predictions, std::span<const ResponseTrack> gts,
                         const OverlapFn& overlap, double threshold) {
    if (gts.empty()) return 0.0;
    std::vector<std::size_t> order(predictions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (predictions[a].score != predictions[b].score) return predictions[a].score > predictions[b].score;
        return predictions[a].query < predictions[b].query;
    });
    std::vector<bool> matched(gts.size(), false);
    std::vector<double> precision(order.size());
    std::vector<bool> tp(order.size(), false);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& p = predictions[order[r]];
        if (p.query >= gts.size()) throw InputError("prediction refers to an unknown query");
        if (!matched[p.query] && overlap(p.track, gts[p.query]) >= threshold) {
            matched[p.query] = true;
            tp[r] = true;
            ++hits;
        }
        precision[r] = static_cast<double>(hits) / static_cast<double>(r + 1);
    }
    for (std::size_t r = precision.size(); r-- > 1;) precision[r - 1] = std::max(precision[r - 1], precision[r]);
    double ap = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r)
        if (tp[r]) ap += precision[r];
    return ap / static_cast<double>(gts.size());
}

bool success(const ResponseTrack& pred, const ResponseTrack& gt, bool temporal) {
    return (temporal ? temporal_iou(pred, gt) : st_iou(pred, gt)) > 0.05;
}

double recovery(const ResponseTrack& pred, const ResponseTrack& gt) {
    if (pred.empty()) return 0.0;
    std::map<int, const BBox*> gt_boxes;
    for (const auto& fb : gt.boxes) gt_boxes[fb.frame] = &fb.box;
    std::size_t good = 0;
    for (const auto& fb : pred.boxes) {
        const auto it = gt_boxes.find(fb.frame);
        if (it != gt_boxes.end() && box_iou(fb.box, *it->second) >= 0.5) ++good;
    }
    return 100.0 * static_cast<double>(good) / static_cast<double>(pred.boxes.size());
}

Report evaluate(std::span<const QueryResult> results, std::span<const Annotation> annotations,
                const EvaluateOptions& options) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < annotations.size(); ++i)
        if (!index.emplace(annotations[i].query_id, i).second)
            throw InputError("duplicate annotation for query '" + annotations[i].query_id + "'");
    std::vector<ResponseTrack> gts;
    gts.reserve(annotations.size());
    for (const auto& a : annotations) gts.push_back(a.gt_track);

    std::vector<ScoredPrediction> predictions;
    std::vector<const QueryResult*> by_query(annotations.size(), nullptr);
    for (const auto& r : results) {
        const auto it = index.find(r.query_id);
        if (it == index.end()) throw InputError("result for unknown query '" + r.query_id + "'");
        if (by_query[it->second]) throw InputError("more than one result for query '" + r.query_id + "'");
        by_query[it->second] = &r;
        predictions.push_back({it->second, r.score, r.track});
    }

    Report report;
    if (annotations.empty()) return report;
    report.stap25 = average_precision(predictions, gts, st_iou, options.threshold);
    report.tap25 = average_precision(predictions, gts, temporal_iou, options.threshold);
    double succ = 0.0;
    double rec = 0.0;
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        const QueryResult* r = by_query[i];
        if (!r || r->track.empty()) continue;
        succ += success(r->track, gts[i], options.temporal_success) ? 1.0 : 0.0;
        rec += recovery(r->track, gts[i]);
    }
    const auto n = static_cast<double>(annotations.size());
    report.success = 100.0 * succ / n;
    report.recovery = rec / n;
    return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json track_json(const ResponseTrack& t) {
    json arr = json::array();
    for (const auto& fb : t.boxes) {
        json b;
        b["frame"] = fb.frame;
        b["x"] = fb.box.x;
        b["y"] = fb.box.y;
        b["w"] = fb.box.w;
        b["h"] = fb.box.h;
        arr.push_back(std::move(b));
    }
    return arr;
}

ResponseTrack parse_track(const json& j, const std::string& where) {
    if (!j.is_array()) throw FormatError(where + ": track must be a list");
    ResponseTrack t;
    for (const auto& b : j)
        t.boxes.push_back({b.at("frame").get<int>(),
                           {b.at("x").get<double>(), b.at("y").get<double>(), b.at("w").get<double>(),
                            b.at("h").get<double>()}});
    for (std::size_t i = 1; i < t.boxes.size(); ++i)
        if (t.boxes[i].frame <= t.boxes[i - 1].frame) throw FormatError(where + ": track frames not increasing");
    return t;
}

json parse_doc(std::string_view text, const char* name) {
    try {
        json j = json::parse(text);
        if (!j.is_array()) throw FormatError(std::string(name) + " must contain a JSON list");
        return j;
    } catch (const json::parse_error& e) {
        throw FormatError(std::string(name) + " is not valid JSON: " + e.what());
    }
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace

std::vector<Annotation> parse_annotations(std::string_view text) {
    const json doc = parse_doc(text, "annotations");
    std::vector<Annotation> out;
    std::size_t i = 0;
    for (const auto& j : doc) {
        const std::string where = "annotation " + std::to_string(i++);
        try {
            Annotation a;
            a.query_id = j.at("query_id").get<std::string>();
            a.video_id = j.at("video_id").get<std::string>();
            a.query_frame = j.at("query_frame").get<int>();
            const auto& qb = j.at("query_box");
            a.query_box = {qb.at("x").get<double>(), qb.at("y").get<double>(), qb.at("w").get<double>(),
                           qb.at("h").get<double>()};
            a.query_time = j.at("query_time").get<int>();
            a.gt_track = parse_track(j.at("gt_track"), where);
            a.gt_track.score = 1.0;
            out.push_back(std::move(a));
        } catch (const json::exception& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return out;
}

std::string annotations_to_json(std::span<const Annotation> annotations) {
    json doc = json::array();
    for (const auto& a : annotations) {
        json j;
        j["query_id"] = a.query_id;
        j["video_id"] = a.video_id;
        j["query_frame"] = a.query_frame;
        j["query_box"] = {{"x", a.query_box.x}, {"y", a.query_box.y}, {"w", a.query_box.w}, {"h", a.query_box.h}};
        j["query_time"] = a.query_time;
        j["gt_track"] = track_json(a.gt_track);
        doc.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

std::vector<QueryResult> parse_results(std::string_view text) {
    const json doc = parse_doc(text, "results");
    std::vector<QueryResult> out;
    std::size_t i = 0;
    for (const auto& j : doc) {
        const std::string where = "result " + std::to_string(i++);
        try {
            QueryResult r;
            r.query_id = j.at("query_id").get<std::string>();
            r.score = j.at("score").get<double>();
            r.track = parse_track(j.at("track"), where);
            r.track.score = r.score;
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return out;
}

std::string results_to_json(std::span<const QueryResult> results) {
    json doc = json::array();
    for (const auto& r : results) {
        json j;
        j["query_id"] = r.query_id;
        j["score"] = r.score;
        j["track"] = track_json(r.track);
        doc.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

std::string report_to_json(const Report& report) {
    json j;
    j["stAP25"] = round3(report.stap25);
    j["tAP25"] = round3(report.tap25);
    j["success"] = round3(report.success);
    j["recovery"] = round3(report.recovery);
    return j.dump(2) + "\n";
}

}  // namespace vqloc

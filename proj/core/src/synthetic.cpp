#include "vqloc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "vqloc/error.hpp"

namespace vqloc {
namespace {

using json = nlohmann::ordered_json;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// mt19937_64 is specified bit-exactly; the distributions below are written out so the
// generated scenarios do not depend on the standard library's distribution algorithms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double normal() {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_int(0, static_cast<int>(i) - 1))]);
    }

private:
    std::mt19937_64 gen_;
};

using Vec = std::vector<double>;

double vdot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize(Vec& v) {
    const double n = std::sqrt(vdot(v, v));
    for (double& x : v) x /= n;
}

Vec combine(double a, const Vec& u, double b, const Vec& v) {
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = a * u[i] + b * v[i];
    return out;
}

std::vector<Vec> orthonormal_basis(std::size_t count, int dim, Rng& rng) {
    std::vector<Vec> basis;
    while (basis.size() < count) {
        Vec v(static_cast<std::size_t>(dim));
        for (double& x : v) x = rng.normal();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                const double p = vdot(v, b);
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * b[i];
            }
        const double n = std::sqrt(vdot(v, v));
        if (n < 1e-6) continue;
        for (double& x : v) x /= n;
        basis.push_back(std::move(v));
    }
    return basis;
}

Vec slerp(const Vec& a, const Vec& b, double t) {
    const double c = std::clamp(vdot(a, b), -1.0, 1.0);
    const double omega = std::acos(c);
    if (omega < 1e-9) return a;
    const double s = std::sin(omega);
    return combine(std::sin((1.0 - t) * omega) / s, a, std::sin(t * omega) / s, b);
}

struct Span {
    int start;
    int end;
};

// Up to n disjoint spans inside [first, last] with lengths in [len_min, len_max] and
// at least gap_min empty frames between consecutive spans.
std::vector<Span> make_spans(Rng& rng, int n, int first, int last, int len_min, int len_max, int gap_min) {
    std::vector<Span> spans;
    int cursor = first;
    for (int i = 0; i < n; ++i) {
        const int len = rng.uniform_int(len_min, len_max);
        const int remaining = n - i - 1;
        const int reserve = remaining * (len_min + gap_min);
        const int latest_start = last - reserve - len + 1;
        if (latest_start < cursor) break;
        const int start = rng.uniform_int(cursor, cursor + (latest_start - cursor) / (remaining + 1));
        spans.push_back({start, start + len - 1});
        cursor = start + len + gap_min;
    }
    return spans;
}

struct Slot {
    int x;
    int y;
    int size;
};

Appearance make_appearance(Rng& rng, const Slot& slot, Span span, int w, int h, const Vec& view_from,
                           const Vec& view_to) {
    Appearance a;
    a.start = span.start;
    a.end = span.end;
    const int lo_x = slot.x + 2;
    const int hi_x = slot.x + slot.size - 2 - w;
    const int lo_y = slot.y + 2;
    const int hi_y = slot.y + slot.size - 2 - h;
    const int x0 = rng.uniform_int(lo_x, std::max(lo_x, hi_x));
    const int y0 = rng.uniform_int(lo_y, std::max(lo_y, hi_y));
    a.box = {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(w), static_cast<double>(h)};
    const int len = span.end - span.start;
    if (len > 0) {
        a.vx = std::clamp(rng.uniform(lo_x - x0, std::max(lo_x, hi_x) - x0) / len, -2.0, 2.0);
        a.vy = std::clamp(rng.uniform(lo_y - y0, std::max(lo_y, hi_y) - y0) / len, -2.0, 2.0);
    }
    a.view_from = view_from;
    a.view_to = view_to;
    return a;
}

Rgb random_color(Rng& rng, int lo, int hi) {
    return {static_cast<std::uint8_t>(rng.uniform_int(lo, hi)), static_cast<std::uint8_t>(rng.uniform_int(lo, hi)),
            static_cast<std::uint8_t>(rng.uniform_int(lo, hi))};
}

const char* kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::clean: return "clean";
        case ScenarioKind::reappearance: return "reappearance";
        case ScenarioKind::bleed: return "bleed";
    }
    return "clean";
}

ScenarioKind kind_from_name(const std::string& s) {
    if (s == "clean") return ScenarioKind::clean;
    if (s == "reappearance") return ScenarioKind::reappearance;
    if (s == "bleed") return ScenarioKind::bleed;
    throw InputError("unknown scenario kind '" + s + "'");
}

const char* role_name(ObjectRole r) {
    switch (r) {
        case ObjectRole::target: return "target";
        case ObjectRole::distractor: return "distractor";
        case ObjectRole::decoy: return "decoy";
    }
    return "distractor";
}

ObjectRole role_from_name(const std::string& s) {
    if (s == "target") return ObjectRole::target;
    if (s == "distractor") return ObjectRole::distractor;
    if (s == "decoy") return ObjectRole::decoy;
    throw FormatError("unknown object role '" + s + "'");
}

void check_params(const SyntheticParams& p) {
    auto fail = [](const std::string& m) { throw InputError("invalid synthetic params: " + m); };
    if (p.frame_count < 1) fail("frame_count must be >= 1");
    if (p.width < 8 || p.height < 8) fail("frame must be at least 8x8");
    if (p.dim < 1) fail("dim must be >= 1");
    if (p.feature_stride < 1) fail("feature_stride must be >= 1");
    if (p.targets < 0 || p.distractors < 0 || p.decoys < 0) fail("object counts must be >= 0");
    if (p.noise < 0.0 || p.noise > 1.0) fail("noise must lie in [0, 1]");
    if (p.background_query_affinity < 0.0 || p.background_query_affinity >= 1.0)
        fail("background_query_affinity must lie in [0, 1)");
    if (p.decoy_similarity < -1.0 || p.decoy_similarity > 1.0) fail("decoy_similarity must lie in [-1, 1]");
    if (p.slot_size < 24) fail("slot_size must be >= 24");
    if (!(p.fps > 0.0)) fail("fps must be positive");
}

}  // namespace

SyntheticParams SyntheticParams::preset(ScenarioKind kind) {
    SyntheticParams p;
    p.kind = kind;
    if (kind == ScenarioKind::bleed) {
        p.background_mask = false;
        p.background_query_affinity = 0.8;
        p.decoys = 1;
        p.distractors = 2;
    }
    return p;
}

BBox Appearance::box_at(int frame) const {
    const int dt = frame - start;
    return {box.x + std::floor(vx * dt + 0.5), box.y + std::floor(vy * dt + 0.5), box.w, box.h};
}

VideoInfo SyntheticScenario::video_info() const {
    VideoInfo info;
    info.video_id = video_id();
    info.fps = params.fps;
    info.width = params.width;
    info.height = params.height;
    info.dim = params.dim;
    for (int i = 0; i < params.frame_count; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06d.png", i);
        info.frames.push_back({i, i, name});
    }
    return info;
}

std::vector<double> SyntheticScenario::embedding_at(const SceneObject& object, const Appearance& app,
                                                    int frame) const {
    const double t = app.end > app.start ? static_cast<double>(frame - app.start) / (app.end - app.start) : 0.0;
    Vec v = slerp(app.view_from, app.view_to, std::clamp(t, 0.0, 1.0));
    normalize(v);
    if (params.noise > 0.0) {
        Rng rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(object.object_id) * 0x10001ull +
                                             static_cast<std::uint64_t>(frame))));
        Vec p(v.size());
        for (double& x : p) x = rng.normal();
        const double proj = vdot(p, v);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= proj * v[i];
        const double n = std::sqrt(vdot(p, p));
        if (n > 1e-12) {
            const double magnitude = params.noise * rng.uniform();
            for (std::size_t i = 0; i < p.size(); ++i) v[i] += p[i] / n * magnitude;
            normalize(v);
        }
    }
    return v;
}

std::size_t SyntheticScenario::planted_region_count() const {
    std::size_t count = 0;
    const double frame_area = static_cast<double>(params.width) * params.height;
    for (int f = 0; f < params.frame_count; ++f) {
        double covered = 0.0;
        for (const auto& o : objects)
            for (const auto& a : o.appearances)
                if (a.visible(f)) {
                    ++count;
                    covered += clamp_to_frame(a.box_at(f), params.width, params.height).area();
                }
        if (params.background_mask && covered < frame_area) ++count;
    }
    return count;
}

ResponseTrack latest_occurrence(const SceneObject& object, int query_time) {
    const Appearance* latest = nullptr;
    for (const auto& a : object.appearances)
        if (a.start <= query_time && (!latest || a.start > latest->start)) latest = &a;
    ResponseTrack track;
    if (!latest) return track;
    for (int f = latest->start; f <= std::min(latest->end, query_time); ++f) track.boxes.push_back({f, latest->box_at(f)});
    track.score = 1.0;
    return track;
}

SyntheticScenario generate_scenario(std::uint64_t seed, const SyntheticParams& p) {
    check_params(p);
    Rng rng(splitmix64(seed));
    SyntheticScenario sc;
    sc.seed = seed;
    sc.params = p;

    const std::size_t n_vectors = 1 + 2 * static_cast<std::size_t>(p.targets) + p.decoys + p.distractors;
    if (static_cast<std::size_t>(p.dim) < n_vectors)
        throw InputError("dim " + std::to_string(p.dim) + " too small for " + std::to_string(n_vectors) +
                         " orthogonal directions");
    const auto basis = orthonormal_basis(n_vectors, p.dim, rng);
    std::size_t next_vec = 0;
    const Vec& bg_dir = basis[next_vec++];

    std::vector<Slot> slots;
    for (int y = 0; y + p.slot_size <= p.height; y += p.slot_size)
        for (int x = 0; x + p.slot_size <= p.width; x += p.slot_size) slots.push_back({x, y, p.slot_size});
    const int n_objects = p.targets + p.decoys + p.distractors;
    if (n_objects > static_cast<int>(slots.size()))
        throw InputError(std::to_string(n_objects) + " objects do not fit into " + std::to_string(slots.size()) +
                         " layout slots");
    rng.shuffle(slots);
    std::size_t next_slot = 0;
    int next_id = 0;
    const int F = p.frame_count;
    const int max_side = p.slot_size - 4;
    auto side = [&](int lo, int hi) { return std::min(rng.uniform_int(lo, hi), max_side); };

    Vec first_target_base;
    int latest_target_frame = 0;
    for (int t = 0; t < p.targets; ++t) {
        SceneObject o;
        o.object_id = next_id++;
        o.role = ObjectRole::target;
        const Vec& ea = basis[next_vec++];
        const Vec& eb = basis[next_vec++];
        o.base = ea;
        if (first_target_base.empty()) first_target_base = ea;
        const Slot& slot = slots[next_slot++];
        switch (p.kind) {
            case ScenarioKind::clean: {
                const int w = side(20, 40);
                const int h = side(20, 40);
                const int n = rng.uniform_int(1, 3);
                for (const auto& span : make_spans(rng, n, 1, F - 1, 4, 10, 3))
                    o.appearances.push_back(make_appearance(rng, slot, span, w, h, ea, ea));
                break;
            }
            case ScenarioKind::reappearance: {
                const int w = side(24, 40);
                const int h = side(24, 40);
                const double final_cos = rng.uniform(0.5, 0.6);
                const double final_angle = std::acos(final_cos);
                const double drift_angle = final_angle - rng.uniform(3.0, 8.0) * std::numbers::pi / 180.0;
                const Vec drift_view = combine(std::cos(drift_angle), ea, std::sin(drift_angle), eb);
                const Vec final_view = combine(final_cos, ea, std::sin(final_angle), eb);
                const int s1 = rng.uniform_int(1, std::max(1, F / 8));
                const int e1 = std::min(F - 1, s1 + rng.uniform_int(8, 12) - 1);
                const int s2 = std::min(F - 1, e1 + rng.uniform_int(8, 15));
                const int e2 = std::min(F - 1, s2 + rng.uniform_int(4, 8) - 1);
                o.appearances.push_back(make_appearance(rng, slot, {s1, e1}, w, h, ea, drift_view));
                if (s2 > e1 + 1) o.appearances.push_back(make_appearance(rng, slot, {s2, e2}, w, h, final_view, final_view));
                break;
            }
            case ScenarioKind::bleed: {
                const int w = side(36, 48);
                const int h = side(36, 48);
                const int s1 = rng.uniform_int(1, std::max(1, F / 6));
                const int e1 = std::min(F - 1, s1 + rng.uniform_int(6, 10) - 1);
                o.appearances.push_back(make_appearance(rng, slot, {s1, e1}, w, h, ea, ea));
                break;
            }
        }
        if (!o.appearances.empty()) latest_target_frame = std::max(latest_target_frame, o.appearances.back().end);
        sc.objects.push_back(std::move(o));
    }

    sc.background = bg_dir;
    if (p.background_query_affinity > 0.0 && !first_target_base.empty()) {
        const double b = p.background_query_affinity;
        sc.background = combine(b, first_target_base, std::sqrt(1.0 - b * b), bg_dir);
    }

    int latest_decoy_frame = 0;
    for (int d = 0; d < p.decoys; ++d) {
        SceneObject o;
        o.object_id = next_id++;
        o.role = ObjectRole::decoy;
        const Vec& u = basis[next_vec++];
        const Vec& anchor = first_target_base.empty() ? bg_dir : first_target_base;
        const double s = p.decoy_similarity;
        o.base = combine(s, anchor, std::sqrt(std::max(0.0, 1.0 - s * s)), u);
        const Slot& slot = slots[next_slot++];
        const int w = side(8, 12);
        const int h = side(8, 12);
        const int first = std::min(F - 1, latest_target_frame + 3);
        for (const auto& span : make_spans(rng, 1, first, F - 1, 4, 8, 1))
            o.appearances.push_back(make_appearance(rng, slot, span, w, h, o.base, o.base));
        if (!o.appearances.empty()) latest_decoy_frame = std::max(latest_decoy_frame, o.appearances.back().end);
        sc.objects.push_back(std::move(o));
    }

    const int min_distractor = p.kind == ScenarioKind::bleed ? 28 : 16;
    for (int d = 0; d < p.distractors; ++d) {
        SceneObject o;
        o.object_id = next_id++;
        o.role = ObjectRole::distractor;
        o.base = basis[next_vec++];
        const Slot& slot = slots[next_slot++];
        const int w = side(min_distractor, 36);
        const int h = side(min_distractor, 36);
        for (const auto& span : make_spans(rng, rng.uniform_int(1, 2), 0, F - 1, 3, 15, 2))
            o.appearances.push_back(make_appearance(rng, slot, span, w, h, o.base, o.base));
        sc.objects.push_back(std::move(o));
    }

    for (const auto& o : sc.objects) {
        if (o.role != ObjectRole::target || o.appearances.empty()) continue;
        SyntheticQuery q;
        q.query_id = sc.video_id() + "_q" + std::to_string(o.object_id);
        q.object_id = o.object_id;
        const auto& first_app = o.appearances.front();
        q.query_frame = first_app.start;
        q.query_box = first_app.box_at(first_app.start);
        int earliest_t = o.appearances.back().end;
        if (p.kind == ScenarioKind::clean) earliest_t = first_app.end;
        if (p.kind == ScenarioKind::bleed) earliest_t = std::max(earliest_t, latest_decoy_frame);
        q.query_time = rng.uniform_int(std::min(earliest_t, F - 1), F - 1);
        q.ground_truth = latest_occurrence(o, q.query_time);
        sc.queries.push_back(std::move(q));
    }
    return sc;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

json box_json(const BBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

BBox box_from(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 4) throw FormatError("box must have 4 entries");
    return {v[0], v[1], v[2], v[3]};
}

json params_json(const SyntheticParams& p) {
    json j;
    j["kind"] = kind_name(p.kind);
    j["frame_count"] = p.frame_count;
    j["width"] = p.width;
    j["height"] = p.height;
    j["dim"] = p.dim;
    j["feature_stride"] = p.feature_stride;
    j["targets"] = p.targets;
    j["distractors"] = p.distractors;
    j["decoys"] = p.decoys;
    j["noise"] = p.noise;
    j["background_mask"] = p.background_mask;
    j["background_query_affinity"] = p.background_query_affinity;
    j["decoy_similarity"] = p.decoy_similarity;
    j["slot_size"] = p.slot_size;
    j["fps"] = p.fps;
    return j;
}

SyntheticParams params_from(const json& j) {
    if (!j.is_object()) throw InputError("synthetic params must be a JSON object");
    // "kind" selects the preset; the remaining keys override it.
    SyntheticParams p = SyntheticParams::preset(kind_from_name(j.value("kind", std::string("clean"))));
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "kind") continue;
            else if (key == "frame_count") p.frame_count = value.get<int>();
            else if (key == "width") p.width = value.get<int>();
            else if (key == "height") p.height = value.get<int>();
            else if (key == "dim") p.dim = value.get<int>();
            else if (key == "feature_stride") p.feature_stride = value.get<int>();
            else if (key == "targets") p.targets = value.get<int>();
            else if (key == "distractors") p.distractors = value.get<int>();
            else if (key == "decoys") p.decoys = value.get<int>();
            else if (key == "noise") p.noise = value.get<double>();
            else if (key == "background_mask") p.background_mask = value.get<bool>();
            else if (key == "background_query_affinity") p.background_query_affinity = value.get<double>();
            else if (key == "decoy_similarity") p.decoy_similarity = value.get<double>();
            else if (key == "slot_size") p.slot_size = value.get<int>();
            else if (key == "fps") p.fps = value.get<double>();
            else throw InputError("unknown synthetic parameter '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("synthetic params: ") + e.what());
    }
    check_params(p);
    return p;
}

json track_json(const ResponseTrack& t) {
    json boxes = json::array();
    for (const auto& fb : t.boxes) boxes.push_back({{"frame", fb.frame}, {"box", box_json(fb.box)}});
    return boxes;
}

ResponseTrack track_from(const json& j) {
    ResponseTrack t;
    for (const auto& e : j) t.boxes.push_back({e.at("frame").get<int>(), box_from(e.at("box"))});
    t.score = 1.0;
    return t;
}

}  // namespace

SyntheticParams params_from_json(std::string_view text) {
    try {
        return params_from(json::parse(text));
    } catch (const json::parse_error& e) {
        throw InputError(std::string("synthetic params are not valid JSON: ") + e.what());
    }
}

std::string params_to_json(const SyntheticParams& p) { return params_json(p).dump(2); }

std::string scenario_to_json(const SyntheticScenario& sc) {
    json j;
    j["seed"] = sc.seed;
    j["params"] = params_json(sc.params);
    j["part_merge_px"] = sc.part_merge_px;
    j["background"] = sc.background;
    json objects = json::array();
    for (const auto& o : sc.objects) {
        json jo;
        jo["object_id"] = o.object_id;
        jo["role"] = role_name(o.role);
        jo["base"] = o.base;
        if (o.part) jo["part"] = box_json(*o.part);
        json apps = json::array();
        for (const auto& a : o.appearances) {
            json ja;
            ja["start"] = a.start;
            ja["end"] = a.end;
            ja["box"] = box_json(a.box);
            ja["vx"] = a.vx;
            ja["vy"] = a.vy;
            ja["view_from"] = a.view_from;
            ja["view_to"] = a.view_to;
            ja["textured"] = a.textured;
            apps.push_back(std::move(ja));
        }
        jo["appearances"] = std::move(apps);
        objects.push_back(std::move(jo));
    }
    j["objects"] = std::move(objects);
    json queries = json::array();
    for (const auto& q : sc.queries) {
        json jq;
        jq["query_id"] = q.query_id;
        jq["object_id"] = q.object_id;
        jq["query_frame"] = q.query_frame;
        jq["query_box"] = box_json(q.query_box);
        jq["query_time"] = q.query_time;
        jq["ground_truth"] = track_json(q.ground_truth);
        queries.push_back(std::move(jq));
    }
    j["queries"] = std::move(queries);
    return j.dump(1) + "\n";
}

SyntheticScenario scenario_from_json(std::string_view text) {
    SyntheticScenario sc;
    try {
        const json j = json::parse(text);
        sc.seed = j.at("seed").get<std::uint64_t>();
        sc.params = params_from(j.at("params"));
        sc.part_merge_px = j.value("part_merge_px", 24);
        sc.background = j.at("background").get<Vec>();
        for (const auto& jo : j.at("objects")) {
            SceneObject o;
            o.object_id = jo.at("object_id").get<int>();
            o.role = role_from_name(jo.at("role").get<std::string>());
            o.base = jo.at("base").get<Vec>();
            if (jo.contains("part")) o.part = box_from(jo.at("part"));
            for (const auto& ja : jo.at("appearances")) {
                Appearance a;
                a.start = ja.at("start").get<int>();
                a.end = ja.at("end").get<int>();
                a.box = box_from(ja.at("box"));
                a.vx = ja.at("vx").get<double>();
                a.vy = ja.at("vy").get<double>();
                a.view_from = ja.at("view_from").get<Vec>();
                a.view_to = ja.at("view_to").get<Vec>();
                a.textured = ja.value("textured", true);
                o.appearances.push_back(std::move(a));
            }
            sc.objects.push_back(std::move(o));
        }
        for (const auto& jq : j.at("queries")) {
            SyntheticQuery q;
            q.query_id = jq.at("query_id").get<std::string>();
            q.object_id = jq.at("object_id").get<int>();
            q.query_frame = jq.at("query_frame").get<int>();
            q.query_box = box_from(jq.at("query_box"));
            q.query_time = jq.at("query_time").get<int>();
            q.ground_truth = track_from(jq.at("ground_truth"));
            sc.queries.push_back(std::move(q));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("scenario.json: ") + e.what());
    }
    for (const auto& o : sc.objects)
        if (o.base.size() != static_cast<std::size_t>(sc.params.dim))
            throw FormatError("scenario.json: object " + std::to_string(o.object_id) + " has the wrong dimension");
    return sc;
}

// ---------------------------------------------------------------------------
// world and backends

SyntheticWorld::SyntheticWorld(SyntheticScenario scenario) : scenario_(std::move(scenario)) {
    info_ = scenario_.video_info();
    const auto& p = scenario_.params;
    frames_.resize(static_cast<std::size_t>(p.frame_count));
    for (const auto& o : scenario_.objects) {
        Rng colors(splitmix64(scenario_.seed ^ (0xC0102ull + static_cast<std::uint64_t>(o.object_id))));
        const Rgb a = random_color(colors, 150, 255);
        const Rgb b = random_color(colors, 0, 90);
        for (const auto& app : o.appearances) {
            for (int f = std::max(0, app.start); f <= std::min(app.end, p.frame_count - 1); ++f) {
                Placement pl;
                pl.object_id = o.object_id;
                pl.role = o.role;
                pl.box = app.box_at(f);
                if (o.part)
                    pl.part_box = BBox{pl.box.x + o.part->x * pl.box.w, pl.box.y + o.part->y * pl.box.h,
                                       o.part->w * pl.box.w, o.part->h * pl.box.h};
                pl.embedding = scenario_.embedding_at(o, app, f);
                pl.textured = app.textured;
                pl.color_a = a;
                pl.color_b = b;
                frames_[static_cast<std::size_t>(f)].push_back(std::move(pl));
            }
        }
    }
}

const std::vector<SyntheticWorld::Placement>& SyntheticWorld::placements(int frame) const {
    if (frame < 0 || frame >= static_cast<int>(frames_.size()))
        throw BackendError(frame, "frame outside the synthetic video");
    return frames_[static_cast<std::size_t>(frame)];
}

namespace {

// Pixel columns [begin, end) of a view whose centres map into [lo, hi) of the source.
std::pair<int, int> raster_range(double lo, double hi, double crop_origin, double zoom, int size) {
    constexpr double eps = 1e-9;
    const int b = static_cast<int>(std::ceil((lo - crop_origin) * zoom - 0.5 - eps));
    const int e = static_cast<int>(std::ceil((hi - crop_origin) * zoom - 0.5 - eps));
    return {std::clamp(b, 0, size), std::clamp(e, 0, size)};
}

std::optional<BinaryMask> raster_rect(const BBox& rect, const FrameView& view) {
    const auto [x0, x1] = raster_range(rect.x, rect.right(), view.crop.x, view.zoom_x(), view.width);
    const auto [y0, y1] = raster_range(rect.y, rect.bottom(), view.crop.y, view.zoom_y(), view.height);
    if (x1 <= x0 || y1 <= y0) return std::nullopt;
    return BinaryMask::from_rect(view.width, view.height, x0, y0, x1, y1);
}

const SyntheticWorld::Placement* placement_at(const std::vector<SyntheticWorld::Placement>& placements, double x,
                                              double y) {
    for (const auto& p : placements)
        if (x >= p.box.x && x < p.box.right() && y >= p.box.y && y < p.box.bottom()) return &p;
    return nullptr;
}

}  // namespace

Image SyntheticFrameSource::render(const FrameView& view) const {
    const auto& placements = world_->placements(view.frame_index);
    const double frame_h = world_->info().height;
    Image img(view.width, view.height);
    const double zx = view.zoom_x();
    const double zy = view.zoom_y();
    for (int y = 0; y < view.height; ++y) {
        const double sy = view.crop.y + (y + 0.5) / zy;
        for (int x = 0; x < view.width; ++x) {
            const double sx = view.crop.x + (x + 0.5) / zx;
            auto* px = img.pixel(x, y);
            if (const auto* p = placement_at(placements, sx, sy)) {
                bool checker = false;
                if (p->textured) {
                    const auto cx = static_cast<long>(std::floor((sx - p->box.x) / 3.0));
                    const auto cy = static_cast<long>(std::floor((sy - p->box.y) / 3.0));
                    checker = ((cx + cy) & 1) != 0;
                }
                const Rgb& c = checker ? p->color_b : p->color_a;
                std::copy(c.begin(), c.end(), px);
            } else {
                const auto g = static_cast<std::uint8_t>(70.0 + 60.0 * std::clamp(sy / frame_h, 0.0, 1.0));
                px[0] = g;
                px[1] = g;
                px[2] = static_cast<std::uint8_t>(g + 20);
            }
        }
    }
    return img;
}

std::vector<BinaryMask> SyntheticSegmenter::segment(const FrameView& view) const {
    const auto& placements = world_->placements(view.frame_index);
    const auto& sc = world_->scenario();
    std::vector<BinaryMask> masks;
    MaskGrid covered;
    if (sc.params.background_mask) covered = MaskGrid(view.width, view.height);
    for (const auto& p : placements) {
        BBox rect = p.box;
        if (p.part_box) {
            const double shown = std::min(p.box.w * view.zoom_x(), p.box.h * view.zoom_y());
            if (shown < sc.part_merge_px) rect = *p.part_box;
        }
        auto mask = raster_rect(rect, view);
        if (!mask) continue;
        if (sc.params.background_mask) {
            // background is whatever the object rectangles leave uncovered
            if (auto full = raster_rect(p.box, view))
                full->for_each_span([&](int row, int a, int b) {
                    for (int x = a; x < b; ++x) covered.set(x, row, true);
                });
        }
        masks.push_back(std::move(*mask));
    }
    if (sc.params.background_mask) {
        for (auto& c : covered.cells) c = c ? 0 : 1;
        if (std::any_of(covered.cells.begin(), covered.cells.end(), [](std::uint8_t c) { return c != 0; }))
            masks.push_back(encode_mask(covered));
    }
    return masks;
}

SyntheticExtractor::SyntheticExtractor(std::shared_ptr<const SyntheticWorld> world, int stride)
    : world_(std::move(world)), stride_(stride) {
    if (stride < 1) throw InputError("feature stride must be >= 1");
}

int SyntheticExtractor::depth() const { return world_->scenario().params.dim; }

FeatureMap SyntheticExtractor::extract(const FrameView& view) const {
    const auto& placements = world_->placements(view.frame_index);
    const auto& background = world_->scenario().background;
    const int d = depth();
    const int fh = (view.height + stride_ - 1) / stride_;
    const int fw = (view.width + stride_ - 1) / stride_;
    const int samples = std::min(stride_, 4);
    const double zx = view.zoom_x();
    const double zy = view.zoom_y();
    FeatureMap fm(fh, fw, d);
    std::vector<int> counts(placements.size() + 1);
    for (int cy = 0; cy < fh; ++cy) {
        const int y_begin = cy * stride_;
        const int y_end = std::min(view.height, y_begin + stride_);
        for (int cx = 0; cx < fw; ++cx) {
            const int x_begin = cx * stride_;
            const int x_end = std::min(view.width, x_begin + stride_);
            std::fill(counts.begin(), counts.end(), 0);
            for (int sy = 0; sy < samples; ++sy) {
                const double py = y_begin + (sy + 0.5) * (y_end - y_begin) / samples;
                const double src_y = view.crop.y + py / zy;
                for (int sx = 0; sx < samples; ++sx) {
                    const double px = x_begin + (sx + 0.5) * (x_end - x_begin) / samples;
                    const double src_x = view.crop.x + px / zx;
                    const auto* p = placement_at(placements, src_x, src_y);
                    ++counts[p ? static_cast<std::size_t>(p - placements.data()) : placements.size()];
                }
            }
            auto cell = fm.cell(cy, cx);
            const double total = static_cast<double>(samples * samples);
            for (std::size_t k = 0; k < counts.size(); ++k) {
                if (counts[k] == 0) continue;
                const auto& e = k < placements.size() ? placements[k].embedding : background;
                const double w = counts[k] / total;
                for (int c = 0; c < d; ++c) cell[c] += static_cast<float>(w * e[static_cast<std::size_t>(c)]);
            }
        }
    }
    return fm;
}

Backends make_synthetic_backends(std::shared_ptr<const SyntheticWorld> world, int feature_stride) {
    Backends b;
    b.frames = std::make_shared<SyntheticFrameSource>(world);
    b.segmenter = std::make_shared<SyntheticSegmenter>(world);
    b.extractor = std::make_shared<SyntheticExtractor>(world, feature_stride);
    return b;
}

Backends make_synthetic_backends(std::shared_ptr<const SyntheticWorld> world) {
    const int stride = world->scenario().params.feature_stride;
    return make_synthetic_backends(std::move(world), stride);
}

}  // namespace vqloc

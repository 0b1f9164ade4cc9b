#include "vqloc/bridge.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vqloc/error.hpp"
#include "vqloc/fs_util.hpp"
#include "vqloc/token_store.hpp"

namespace vqloc {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[pos + static_cast<std::size_t>(i)]);
    return v;
}

const char* direction_name(TrackDirection d) { return d == TrackDirection::forward ? "forward" : "backward"; }

}  // namespace

std::string feature_map_file(int frame_index) {
    char name[40];
    std::snprintf(name, sizeof(name), "frame_%06d.fmap", frame_index);
    return name;
}

void write_feature_map(const fs::path& path, const FeatureMap& fm) {
    std::string out = "FMAP";
    put_u32(out, static_cast<std::uint32_t>(fm.height()));
    put_u32(out, static_cast<std::uint32_t>(fm.width()));
    put_u32(out, static_cast<std::uint32_t>(fm.depth()));
    out.reserve(out.size() + fm.data().size() * 4);
    for (float f : fm.data()) put_u32(out, std::bit_cast<std::uint32_t>(f));
    write_file_atomic(path, out);
}

FeatureMap read_feature_map(const fs::path& path) {
    const std::string in = read_file(path);
    if (in.size() < 16 || in.compare(0, 4, "FMAP") != 0)
        throw FormatError(path.string() + ": not a feature map file");
    const auto h = get_u32(in, 4);
    const auto w = get_u32(in, 8);
    const auto d = get_u32(in, 12);
    const std::size_t n = static_cast<std::size_t>(h) * w * d;
    if (in.size() != 16 + n * 4) throw FormatError(path.string() + ": truncated feature map");
    std::vector<float> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = std::bit_cast<float>(get_u32(in, 16 + i * 4));
    try {
        return FeatureMap(static_cast<int>(h), static_cast<int>(w), static_cast<int>(d), std::move(data));
    } catch (const InputError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::vector<RecordedTrack> read_tracks(const fs::path& path) {
    std::vector<RecordedTrack> tracks;
    std::istringstream lines(read_file(path));
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        ++n;
        if (line.empty()) continue;
        const std::string where = "tracks.jsonl line " + std::to_string(n);
        try {
            const json j = json::parse(line);
            RecordedTrack t;
            t.seed_frame = j.at("seed_frame").get<int>();
            const auto dir = j.at("direction").get<std::string>();
            if (dir == "forward") t.direction = TrackDirection::forward;
            else if (dir == "backward") t.direction = TrackDirection::backward;
            else throw FormatError(where + ": unknown direction '" + dir + "'");
            for (const auto& b : j.at("boxes"))
                t.boxes.push_back({b.at("frame").get<int>(), {b.at("x").get<double>(), b.at("y").get<double>(),
                                                              b.at("w").get<double>(), b.at("h").get<double>()}});
            tracks.push_back(std::move(t));
        } catch (const json::exception& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return tracks;
}

void write_tracks(const fs::path& path, const std::vector<RecordedTrack>& tracks) {
    std::string out;
    for (const auto& t : tracks) {
        json j;
        j["seed_frame"] = t.seed_frame;
        j["direction"] = direction_name(t.direction);
        json boxes = json::array();
        for (const auto& fb : t.boxes)
            boxes.push_back({{"frame", fb.frame}, {"x", fb.box.x}, {"y", fb.box.y}, {"w", fb.box.w}, {"h", fb.box.h}});
        j["boxes"] = std::move(boxes);
        out += j.dump() + "\n";
    }
    write_file_atomic(path, out);
}

std::vector<BinaryMask> StoredMaskSegmenter::segment(const FrameView& view) const {
    const auto& info = tokens_->info();
    if (!view.is_full_frame(info.width, info.height))
        throw UnsupportedViewError(view.frame_index, "stored masks only cover full frames");
    if (view.frame_index < 0 || view.frame_index >= tokens_->frame_count())
        throw BackendError(view.frame_index, "frame outside the token store");
    std::vector<BinaryMask> masks;
    for (std::size_t i = tokens_->frame_begin(view.frame_index); i < tokens_->frame_end(view.frame_index); ++i)
        masks.push_back(tokens_->record(i).mask);
    return masks;
}

StoredFeatureBackend::StoredFeatureBackend(VideoInfo info, fs::path features_dir)
    : info_(std::move(info)), dir_(std::move(features_dir)) {}

FeatureMap StoredFeatureBackend::extract(const FrameView& view) const {
    if (!view.is_full_frame(info_.width, info_.height))
        throw UnsupportedViewError(view.frame_index, "stored feature maps only cover full frames");
    const fs::path path = dir_ / feature_map_file(view.frame_index);
    if (!fs::exists(path)) throw BackendError(view.frame_index, "no feature map " + path.string());
    FeatureMap fm = read_feature_map(path);
    if (fm.depth() != info_.dim)
        throw BackendError(view.frame_index, "feature map depth " + std::to_string(fm.depth()) + " != store dim " +
                                                 std::to_string(info_.dim));
    return fm;
}

RecordedTracker::RecordedTracker(std::vector<RecordedTrack> tracks) {
    for (auto& t : tracks) by_seed_.emplace(t.seed_frame, std::move(t));
}

std::vector<FrameBox> RecordedTracker::track(const TrackSeed& seed, TrackDirection direction, int limit_frame) const {
    const auto [lo, hi] = by_seed_.equal_range(seed.frame_index);
    const RecordedTrack* best = nullptr;
    double best_iou = -1.0;
    for (auto it = lo; it != hi; ++it) {
        const auto& t = it->second;
        if (t.direction != direction || t.boxes.empty()) continue;
        const double iou = box_iou(t.boxes.front().box, seed.bbox);
        if (iou > best_iou) {
            best_iou = iou;
            best = &t;
        }
    }
    std::vector<FrameBox> out;
    if (!best) return out;
    const int step = direction == TrackDirection::forward ? 1 : -1;
    int expected = seed.frame_index;
    for (const auto& fb : best->boxes) {
        if (fb.frame != expected) break;
        if (direction == TrackDirection::forward ? fb.frame > limit_frame : fb.frame < limit_frame) break;
        out.push_back(fb);
        expected += step;
    }
    return out;
}

Image PngFrameSource::render(const FrameView& view) const {
    if (view.frame_index < 0 || view.frame_index >= info_.frame_count())
        throw BackendError(view.frame_index, "frame outside the video");
    const auto& entry = info_.frames[static_cast<std::size_t>(view.frame_index)];
    Image img = read_png(dir_ / entry.file);
    if (img.width != info_.width || img.height != info_.height)
        throw BackendError(view.frame_index, entry.file + " has size " + std::to_string(img.width) + "x" +
                                                 std::to_string(img.height) + ", manifest says " +
                                                 std::to_string(info_.width) + "x" + std::to_string(info_.height));
    if (view.is_full_frame(info_.width, info_.height)) return img;
    return resample_crop(img, view.crop, view.width, view.height);
}

BridgeArtifacts bridge_read(const fs::path& store_dir) {
    BridgeArtifacts out;
    auto tokens = std::make_shared<const VideoTokenSet>(load_token_store(store_dir));
    const VideoInfo& info = tokens->info();
    out.tokens = tokens;
    out.backends.segmenter = std::make_shared<StoredMaskSegmenter>(tokens);
    if (fs::is_directory(store_dir / "features"))
        out.backends.extractor = std::make_shared<StoredFeatureBackend>(info, store_dir / "features");
    if (fs::exists(store_dir / "tracks.jsonl"))
        out.backends.tracker = std::make_shared<RecordedTracker>(read_tracks(store_dir / "tracks.jsonl"));
    if (!info.source_dir.empty()) {
        const fs::path frames_dir = store_dir / info.source_dir;
        if (!info.frames.empty() && fs::exists(frames_dir / info.frames.front().file))
            out.backends.frames = std::make_shared<PngFrameSource>(info, frames_dir);
    }
    return out;
}

}  // namespace vqloc

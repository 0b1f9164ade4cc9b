#include "vqloc/token_store.hpp"

#include <bit>
#include <cstring>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vqloc/error.hpp"
#include "vqloc/fs_util.hpp"

namespace vqloc {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

static_assert(sizeof(float) == 4);

std::string encode_floats(const std::vector<float>& values) {
    std::string out(values.size() * 4, '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(values[i]);
        out[i * 4 + 0] = static_cast<char>(bits & 0xFF);
        out[i * 4 + 1] = static_cast<char>((bits >> 8) & 0xFF);
        out[i * 4 + 2] = static_cast<char>((bits >> 16) & 0xFF);
        out[i * 4 + 3] = static_cast<char>((bits >> 24) & 0xFF);
    }
    return out;
}

std::vector<float> decode_floats(const std::string& bytes) {
    if (bytes.size() % 4 != 0) throw FormatError("embeddings.bin length is not a multiple of 4");
    std::vector<float> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[i * 4 + b]);
        out[i] = std::bit_cast<float>(bits);
    }
    return out;
}

template <class T>
T field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(where + ": field '" + std::string(key) + "' has the wrong type");
    }
}

json region_json(const RegionRecord& r, std::size_t byte_offset) {
    json j;
    j["frame_index"] = r.frame_index;
    j["region_id"] = r.region_id;
    j["bbox"] = {r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h};
    json rle;
    rle["width"] = r.mask.width();
    rle["height"] = r.mask.height();
    rle["counts"] = r.mask.runs();
    j["rle"] = std::move(rle);
    j["area_fraction"] = r.area_fraction;
    j["embedding_offset"] = byte_offset;
    return j;
}

RegionRecord parse_region(const json& j, std::size_t line, std::size_t expected_offset) {
    const std::string where = "regions.jsonl line " + std::to_string(line);
    const auto bbox = field<std::vector<double>>(j, "bbox", where);
    if (bbox.size() != 4) throw FormatError(where + ": bbox must have 4 entries");
    const auto& rle = j.contains("rle") ? j.at("rle") : throw FormatError(where + ": missing field 'rle'");
    const auto offset = field<std::size_t>(j, "embedding_offset", where);
    if (offset != expected_offset)
        throw FormatError(where + ": embedding_offset " + std::to_string(offset) + " != " +
                          std::to_string(expected_offset));
    try {
        return {field<int>(j, "frame_index", where), field<int>(j, "region_id", where),
                BBox{bbox[0], bbox[1], bbox[2], bbox[3]},
                BinaryMask(field<int>(rle, "width", where), field<int>(rle, "height", where),
                           field<std::vector<std::uint32_t>>(rle, "counts", where)),
                field<double>(j, "area_fraction", where)};
    } catch (const MaskError& e) {
        throw FormatError(where + ": " + e.what());
    }
}

}  // namespace

std::string manifest_json(const VideoInfo& info, std::size_t region_count) {
    json j;
    j["schema_version"] = kTokenStoreSchemaVersion;
    j["video_id"] = info.video_id;
    j["fps"] = info.fps;
    j["frame_width"] = info.width;
    j["frame_height"] = info.height;
    j["dim"] = info.dim;
    j["extractor_id"] = info.extractor_id;
    j["segmenter_id"] = info.segmenter_id;
    j["frame_count"] = info.frame_count();
    j["region_count"] = region_count;
    j["source_dir"] = info.source_dir;
    json frames = json::array();
    for (const auto& f : info.frames) {
        json e;
        e["index"] = f.index;
        e["source_index"] = f.source_index;
        e["file"] = f.file;
        frames.push_back(std::move(e));
    }
    j["frames"] = std::move(frames);
    return j.dump(2) + "\n";
}

VideoInfo parse_manifest(const std::string& text, std::size_t* region_count) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("manifest.json is not valid JSON: ") + e.what());
    }
    const std::string where = "manifest.json";
    const int version = field<int>(j, "schema_version", where);
    if (version != kTokenStoreSchemaVersion)
        throw FormatError("unsupported token store schema version " + std::to_string(version));
    VideoInfo info;
    info.video_id = field<std::string>(j, "video_id", where);
    info.fps = field<double>(j, "fps", where);
    info.width = field<int>(j, "frame_width", where);
    info.height = field<int>(j, "frame_height", where);
    info.dim = field<int>(j, "dim", where);
    info.extractor_id = field<std::string>(j, "extractor_id", where);
    info.segmenter_id = field<std::string>(j, "segmenter_id", where);
    info.source_dir = j.value("source_dir", std::string{});
    const int frame_count = field<int>(j, "frame_count", where);
    if (info.width < 1 || info.height < 1) throw FormatError(where + ": frame dimensions must be positive");
    if (frame_count < 0) throw FormatError(where + ": negative frame_count");
    if (j.contains("frames")) {
        int expected = 0;
        for (const auto& e : j.at("frames")) {
            FrameEntry entry{field<int>(e, "index", where), field<int>(e, "source_index", where),
                             field<std::string>(e, "file", where)};
            if (entry.index != expected) throw FrameGapError(expected);
            info.frames.push_back(std::move(entry));
            ++expected;
        }
        if (expected < frame_count) throw FrameGapError(expected);
        if (expected > frame_count)
            throw FormatError(where + ": frames list longer than frame_count " + std::to_string(frame_count));
    } else {
        for (int i = 0; i < frame_count; ++i) info.frames.push_back({i, i, {}});
    }
    if (region_count) *region_count = field<std::size_t>(j, "region_count", where);
    return info;
}

void save_token_store(const VideoTokenSet& tokens, const fs::path& dir, bool overwrite) {
    if (fs::exists(dir)) {
        if (!overwrite) throw InputError("token store " + dir.string() + " already exists");
    }
    const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
    fs::create_directories(parent);
    fs::path tmp = dir;
    tmp += ".tmp";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    const auto d = static_cast<std::size_t>(tokens.dim());
    std::string regions;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        regions += region_json(tokens.record(i), i * d * 4).dump();
        regions += '\n';
    }
    write_file_atomic(tmp / "manifest.json", manifest_json(tokens.info(), tokens.size()));
    write_file_atomic(tmp / "regions.jsonl", regions);
    write_file_atomic(tmp / "embeddings.bin", encode_floats(tokens.embeddings()));

    if (fs::exists(dir)) fs::remove_all(dir);
    fs::rename(tmp, dir);
}

VideoTokenSet load_token_store(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InputError("token store " + dir.string() + " does not exist");
    std::size_t region_count = 0;
    VideoInfo info = parse_manifest(read_file(dir / "manifest.json"), &region_count);
    const auto d = static_cast<std::size_t>(info.dim);

    std::vector<RegionRecord> records;
    records.reserve(region_count);
    std::istringstream lines(read_file(dir / "regions.jsonl"));
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++n;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError("regions.jsonl line " + std::to_string(n) + ": " + e.what());
        }
        records.push_back(parse_region(j, n, records.size() * d * 4));
    }
    if (records.size() != region_count)
        throw FormatError("manifest region_count " + std::to_string(region_count) + " but regions.jsonl has " +
                          std::to_string(records.size()) + " records");
    auto embeddings = decode_floats(read_file(dir / "embeddings.bin"));
    return VideoTokenSet(std::move(info), std::move(records), std::move(embeddings));
}

std::vector<std::string> check_token_store(const fs::path& dir) {
    std::vector<std::string> problems;
    for (const char* name : {"manifest.json", "regions.jsonl", "embeddings.bin"})
        if (!fs::exists(dir / name)) problems.push_back(std::string("missing ") + name);
    if (!problems.empty()) return problems;
    try {
        const auto tokens = load_token_store(dir);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const auto& r = tokens.record(i);
            const std::string where = "record " + std::to_string(i);
            if (!(tight_bbox(r.mask) == r.bbox)) problems.push_back(where + ": bbox is not the mask's tight box");
            const double expected = static_cast<double>(r.mask.foreground()) /
                                    (static_cast<double>(r.mask.width()) * r.mask.height());
            if (std::abs(r.area_fraction - expected) > 1e-12)
                problems.push_back(where + ": area_fraction does not match the mask");
            if (tokens.embedding_norm(i) == 0.0) problems.push_back(where + ": zero-norm embedding");
        }
    } catch (const Error& e) {
        problems.emplace_back(e.what());
    }
    return problems;
}

}  // namespace vqloc

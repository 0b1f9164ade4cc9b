#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vqloc/token_set.hpp"

namespace vqloc {

// On-disk layout of a token store directory:
//
//   manifest.json    video metadata and the sampled-frame listing
//   regions.jsonl    one record per region token, ordered by (frame_index, region_id)
//   embeddings.bin   float32 little-endian, row i belongs to record i
inline constexpr int kTokenStoreSchemaVersion = 1;

/// Writes the store; refuses to touch an existing directory unless `overwrite` is set.
/// Files are written into a temporary sibling directory that is renamed into place.
void save_token_store(const VideoTokenSet& tokens, const std::filesystem::path& dir, bool overwrite = false);

VideoTokenSet load_token_store(const std::filesystem::path& dir);

/// Lists every schema violation found in a store directory; empty when it is valid.
std::vector<std::string> check_token_store(const std::filesystem::path& dir);

/// Writes a manifest-only description (no regions); used by bridge tooling and tests.
std::string manifest_json(const VideoInfo& info, std::size_t region_count);
VideoInfo parse_manifest(const std::string& text, std::size_t* region_count = nullptr);

}  // namespace vqloc

#include "vqloc/token_set.hpp"

#include <cmath>
#include <string>

#include "vqloc/error.hpp"
#include "vqloc/vector_math.hpp"

namespace vqloc {

VideoTokenSet::VideoTokenSet(VideoInfo info, std::vector<RegionRecord> records, std::vector<float> embeddings)
    : info_(std::move(info)), records_(std::move(records)), embeddings_(std::move(embeddings)) {
    if (info_.dim < 1) throw FormatError("embedding dimension must be >= 1");
    const auto d = static_cast<std::size_t>(info_.dim);
    if (embeddings_.size() != records_.size() * d)
        throw FormatError("embedding block holds " + std::to_string(embeddings_.size()) + " values, expected " +
                          std::to_string(records_.size() * d));
    for (std::size_t i = 0; i < info_.frames.size(); ++i)
        if (info_.frames[i].index != static_cast<int>(i)) throw FrameGapError(static_cast<int>(i));

    const int frames = info_.frame_count();
    frame_offsets_.assign(static_cast<std::size_t>(frames) + 1, 0);
    norms_.resize(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        if (r.frame_index < 0 || r.frame_index >= frames)
            throw FormatError("token " + std::to_string(i) + " references frame " + std::to_string(r.frame_index) +
                              " outside [0, " + std::to_string(frames) + ")");
        if (i > 0) {
            const auto& p = records_[i - 1];
            if (p.frame_index > r.frame_index || (p.frame_index == r.frame_index && p.region_id >= r.region_id))
                throw FormatError("tokens not sorted by (frame_index, region_id) at record " + std::to_string(i));
        }
        if (r.mask.width() != info_.width || r.mask.height() != info_.height)
            throw FormatError("mask of token " + std::to_string(i) + " does not match the frame size");
        const auto e = embedding(i);
        for (float v : e)
            if (!std::isfinite(v)) throw FormatError("non-finite embedding entry in token " + std::to_string(i));
        norms_[i] = norm(e);
        ++frame_offsets_[static_cast<std::size_t>(r.frame_index) + 1];
    }
    for (std::size_t f = 1; f < frame_offsets_.size(); ++f) frame_offsets_[f] += frame_offsets_[f - 1];
}

RegionToken VideoTokenSet::token(std::size_t i) const {
    const auto& r = records_[i];
    const auto e = embedding(i);
    return {r.frame_index, r.region_id, r.bbox, r.mask, r.area_fraction, {e.begin(), e.end()}};
}

void TokenSetBuilder::add(RegionToken token) {
    if (static_cast<int>(token.embedding.size()) != info_.dim)
        throw FormatError("token dimension " + std::to_string(token.embedding.size()) + " does not match " +
                          std::to_string(info_.dim));
    embeddings_.insert(embeddings_.end(), token.embedding.begin(), token.embedding.end());
    records_.push_back({token.frame_index, token.region_id, token.bbox, std::move(token.mask), token.area_fraction});
}

VideoTokenSet TokenSetBuilder::build() && {
    return VideoTokenSet(std::move(info_), std::move(records_), std::move(embeddings_));
}

}  // namespace vqloc

#pragma once

#include <vector>

#include "vqloc/token_set.hpp"

namespace vqloc::testing {

/// One token of a hand-built token set.
struct TokenSpec {
    std::vector<float> embedding;
    BBox box{0, 0, 10, 10};
};

/// Token set with frames[f] listing the tokens of frame f on a width x height frame.
inline VideoTokenSet make_tokens(const std::vector<std::vector<TokenSpec>>& frames, int width = 100,
                                 int height = 100) {
    VideoInfo info;
    info.video_id = "fixture";
    info.width = width;
    info.height = height;
    info.dim = 0;
    for (const auto& f : frames)
        for (const auto& t : f) info.dim = static_cast<int>(t.embedding.size());
    if (info.dim == 0) info.dim = 2;
    for (int i = 0; i < static_cast<int>(frames.size()); ++i) info.frames.push_back({i, i, ""});
    TokenSetBuilder b(info);
    for (int f = 0; f < static_cast<int>(frames.size()); ++f) {
        int r = 0;
        for (const auto& t : frames[static_cast<std::size_t>(f)]) {
            const auto x0 = static_cast<int>(t.box.x);
            const auto y0 = static_cast<int>(t.box.y);
            auto mask = BinaryMask::from_rect(width, height, x0, y0, x0 + static_cast<int>(t.box.w),
                                              y0 + static_cast<int>(t.box.h));
            const BBox box = tight_bbox(mask);
            const double frac = static_cast<double>(mask.foreground()) / (static_cast<double>(width) * height);
            b.add({f, r++, box, std::move(mask), frac, t.embedding});
        }
    }
    return std::move(b).build();
}

inline QueryToken query(std::vector<float> e) {
    QueryToken q;
    q.embedding = std::move(e);
    return q;
}

}  // namespace vqloc::testing

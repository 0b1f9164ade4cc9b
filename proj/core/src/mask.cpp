#include "vqloc/mask.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "vqloc/error.hpp"

namespace vqloc {
namespace {

// Appends runs while keeping the zero/one alternation; merges adjacent runs of equal value.
class RunBuilder {
public:
    void push(bool value, std::size_t count) {
        if (count == 0) return;
        const bool last = runs_.size() % 2 == 0;  // value of the last run
        if (!runs_.empty() && value == last) {
            runs_.back() += static_cast<std::uint32_t>(count);
            return;
        }
        if (runs_.empty() && value) runs_.push_back(0);
        runs_.push_back(static_cast<std::uint32_t>(count));
    }

    std::vector<std::uint32_t> take() { return std::move(runs_); }

private:
    std::vector<std::uint32_t> runs_;
};

}  // namespace

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint32_t> runs)
    : width_(width), height_(height), runs_(std::move(runs)) {
    if (width <= 0 || height <= 0) throw MaskError("mask dimensions must be positive");
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < runs_.size(); ++i) {
        total += runs_[i];
        if (i % 2 == 1) foreground_ += runs_[i];
    }
    const auto expected = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
    if (total != expected) {
        throw MaskError("run sum " + std::to_string(total) + " does not match " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
    if (foreground_ == 0) throw MaskError("mask has no foreground pixel");
}

BinaryMask BinaryMask::from_rect(int width, int height, int x0, int y0, int x1, int y1) {
    x0 = std::clamp(x0, 0, width);
    x1 = std::clamp(x1, 0, width);
    y0 = std::clamp(y0, 0, height);
    y1 = std::clamp(y1, 0, height);
    RunBuilder b;
    const auto w = static_cast<std::size_t>(width);
    if (x1 <= x0 || y1 <= y0) {
        b.push(false, w * static_cast<std::size_t>(height));
        return BinaryMask(width, height, b.take());  // throws: empty
    }
    b.push(false, static_cast<std::size_t>(y0) * w);
    for (int y = y0; y < y1; ++y) {
        b.push(false, static_cast<std::size_t>(x0));
        b.push(true, static_cast<std::size_t>(x1 - x0));
        b.push(false, static_cast<std::size_t>(width - x1));
    }
    b.push(false, static_cast<std::size_t>(height - y1) * w);
    return BinaryMask(width, height, b.take());
}

MaskGrid decode_mask(const BinaryMask& mask) {
    MaskGrid grid(mask.width(), mask.height());
    mask.for_each_span([&](int row, int x0, int x1) {
        auto* base = grid.cells.data() + static_cast<std::size_t>(row) * grid.width;
        std::fill(base + x0, base + x1, std::uint8_t{1});
    });
    return grid;
}

BinaryMask encode_mask(const MaskGrid& grid) {
    RunBuilder b;
    for (std::uint8_t c : grid.cells) b.push(c != 0, 1);
    return BinaryMask(grid.width, grid.height, b.take());
}

BBox tight_bbox(const BinaryMask& mask) {
    int min_x = std::numeric_limits<int>::max();
    int min_y = std::numeric_limits<int>::max();
    int max_x = -1;
    int max_y = -1;
    mask.for_each_span([&](int row, int x0, int x1) {
        min_x = std::min(min_x, x0);
        max_x = std::max(max_x, x1);
        min_y = std::min(min_y, row);
        max_y = std::max(max_y, row + 1);
    });
    if (max_x < 0) throw MaskError("tight box of an empty mask");
    return {static_cast<double>(min_x), static_cast<double>(min_y), static_cast<double>(max_x - min_x),
            static_cast<double>(max_y - min_y)};
}

}  // namespace vqloc

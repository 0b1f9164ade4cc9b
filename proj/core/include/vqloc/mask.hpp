#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vqloc/geometry.hpp"

namespace vqloc {

/// Dense boolean grid, row-major, one byte per cell.
struct MaskGrid {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> cells;

    MaskGrid() = default;
    MaskGrid(int w, int h) : width(w), height(h), cells(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { cells[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    friend bool operator==(const MaskGrid&, const MaskGrid&) = default;
};

/// Run-length encoded binary mask.
///
/// Runs are row-major and alternate zero-run, one-run, zero-run, ... starting with a
/// zero-run that may have length 0. The constructor rejects run sums that do not match
/// width * height and masks without foreground pixels.
class BinaryMask {
public:
    BinaryMask(int width, int height, std::vector<std::uint32_t> runs);

    /// Filled rectangle [x0, x1) x [y0, y1); coordinates are clipped to the grid.
    static BinaryMask from_rect(int width, int height, int x0, int y0, int x1, int y1);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const std::vector<std::uint32_t>& runs() const noexcept { return runs_; }
    std::size_t foreground() const noexcept { return foreground_; }

    /// Calls fn(row, x_begin, x_end) for every horizontal foreground span, in row-major order.
    template <class Fn>
    void for_each_span(Fn&& fn) const {
        std::size_t pos = 0;
        const auto w = static_cast<std::size_t>(width_);
        for (std::size_t i = 0; i < runs_.size(); ++i) {
            const std::size_t len = runs_[i];
            if (i % 2 == 1) {
                std::size_t p = pos;
                const std::size_t end = pos + len;
                while (p < end) {
                    const std::size_t row = p / w;
                    const std::size_t col = p % w;
                    const std::size_t stop = std::min(end, (row + 1) * w);
                    fn(static_cast<int>(row), static_cast<int>(col), static_cast<int>(col + (stop - p)));
                    p = stop;
                }
            }
            pos += len;
        }
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint32_t> runs_;
    std::size_t foreground_ = 0;
};

MaskGrid decode_mask(const BinaryMask& mask);

/// Throws MaskError when the grid has no foreground pixel.
BinaryMask encode_mask(const MaskGrid& grid);

/// Minimal integer-aligned box covering every foreground pixel.
BBox tight_bbox(const BinaryMask& mask);

}  // namespace vqloc

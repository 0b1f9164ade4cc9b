#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "vqloc/geometry.hpp"

namespace vqloc {

/// 8-bit RGB image, row-major, interleaved.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* pixel(int x, int y) noexcept { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* pixel(int x, int y) const noexcept {
        return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    friend bool operator==(const Image&, const Image&) = default;
};

using Rgb = std::array<std::uint8_t, 3>;

/// Luma 0.299 R + 0.587 G + 0.114 B, row-major.
std::vector<double> to_grayscale(const Image& image);

/// Bilinear resample of the `crop` rectangle of `src` to width x height.
Image resample_crop(const Image& src, const BBox& crop, int width, int height);

/// Burns an axis-aligned rectangle outline of the given thickness into the image.
void draw_box(Image& image, const BBox& box, Rgb color, int thickness = 3);

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

}  // namespace vqloc

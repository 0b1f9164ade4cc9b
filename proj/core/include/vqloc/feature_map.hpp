#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vqloc/mask.hpp"

namespace vqloc {

/// Dense h x w x d feature grid, row-major with channels innermost.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(int height, int width, int depth);
    FeatureMap(int height, int width, int depth, std::vector<float> data);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int depth() const noexcept { return depth_; }
    const std::vector<float>& data() const noexcept { return data_; }
    std::vector<float>& data() noexcept { return data_; }

    std::span<const float> cell(int y, int x) const noexcept {
        return {data_.data() + (static_cast<std::size_t>(y) * width_ + x) * depth_, static_cast<std::size_t>(depth_)};
    }
    std::span<float> cell(int y, int x) noexcept {
        return {data_.data() + (static_cast<std::size_t>(y) * width_ + x) * depth_, static_cast<std::size_t>(depth_)};
    }

    friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    int depth_ = 0;
    std::vector<float> data_;
};

/// Half-pixel bilinear sampling positions along one axis: output index i samples the
/// source at (i + 0.5) * src / dst - 0.5, clamped to [0, src - 1].
struct AxisSample {
    int lo = 0;
    int hi = 0;
    double frac = 0.0;  // weight of `hi`
};
std::vector<AxisSample> bilinear_axis(int src, int dst);

/// Channel-wise bilinear resize to height x width (materialized).
FeatureMap resize_feature_map(const FeatureMap& fm, int height, int width);

/// Mean feature over the mask's foreground; `fm` must already be at the mask's resolution.
std::vector<double> pool_region(const FeatureMap& fm, const BinaryMask& mask);

/// pool_region(resize_feature_map(fm, mask.height(), mask.width()), mask) without
/// materializing the resized map: per-cell bilinear weights are accumulated over the
/// foreground and applied once to the source cells.
std::vector<double> pool_resized(const FeatureMap& fm, const BinaryMask& mask);

}  // namespace vqloc

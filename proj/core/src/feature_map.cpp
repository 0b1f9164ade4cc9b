#include "vqloc/feature_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vqloc/error.hpp"

namespace vqloc {

FeatureMap::FeatureMap(int height, int width, int depth)
    : FeatureMap(height, width, depth,
                 std::vector<float>(static_cast<std::size_t>(std::max(height, 0)) * std::max(width, 0) *
                                    std::max(depth, 0))) {}

FeatureMap::FeatureMap(int height, int width, int depth, std::vector<float> data)
    : height_(height), width_(width), depth_(depth), data_(std::move(data)) {
    if (height < 1 || width < 1 || depth < 1) throw InputError("feature map dimensions must be >= 1");
    if (data_.size() != static_cast<std::size_t>(height) * width * depth)
        throw InputError("feature map data size does not match " + std::to_string(height) + "x" +
                         std::to_string(width) + "x" + std::to_string(depth));
}

std::vector<AxisSample> bilinear_axis(int src, int dst) {
    std::vector<AxisSample> out(static_cast<std::size_t>(dst));
    const double scale = static_cast<double>(src) / dst;
    for (int i = 0; i < dst; ++i) {
        const double s = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(src - 1));
        const int lo = static_cast<int>(std::floor(s));
        const int hi = std::min(lo + 1, src - 1);
        out[static_cast<std::size_t>(i)] = {lo, hi, hi == lo ? 0.0 : s - lo};
    }
    return out;
}

FeatureMap resize_feature_map(const FeatureMap& fm, int height, int width) {
    if (height < 1 || width < 1) throw InputError("resize target must be at least 1x1");
    const auto ys = bilinear_axis(fm.height(), height);
    const auto xs = bilinear_axis(fm.width(), width);
    FeatureMap out(height, width, fm.depth());
    const int d = fm.depth();
    for (int i = 0; i < height; ++i) {
        const auto& ay = ys[static_cast<std::size_t>(i)];
        for (int j = 0; j < width; ++j) {
            const auto& ax = xs[static_cast<std::size_t>(j)];
            const auto c00 = fm.cell(ay.lo, ax.lo);
            const auto c01 = fm.cell(ay.lo, ax.hi);
            const auto c10 = fm.cell(ay.hi, ax.lo);
            const auto c11 = fm.cell(ay.hi, ax.hi);
            const double w00 = (1.0 - ay.frac) * (1.0 - ax.frac);
            const double w01 = (1.0 - ay.frac) * ax.frac;
            const double w10 = ay.frac * (1.0 - ax.frac);
            const double w11 = ay.frac * ax.frac;
            auto dst = out.cell(i, j);
            for (int c = 0; c < d; ++c)
                dst[c] = static_cast<float>(w00 * c00[c] + w01 * c01[c] + w10 * c10[c] + w11 * c11[c]);
        }
    }
    return out;
}

std::vector<double> pool_region(const FeatureMap& fm, const BinaryMask& mask) {
    if (fm.height() != mask.height() || fm.width() != mask.width())
        throw InputError("feature map " + std::to_string(fm.height()) + "x" + std::to_string(fm.width()) +
                         " does not match mask " + std::to_string(mask.height()) + "x" +
                         std::to_string(mask.width()));
    std::vector<double> acc(static_cast<std::size_t>(fm.depth()), 0.0);
    mask.for_each_span([&](int row, int x0, int x1) {
        for (int x = x0; x < x1; ++x) {
            const auto cell = fm.cell(row, x);
            for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += cell[c];
        }
    });
    const double n = static_cast<double>(mask.foreground());
    for (double& v : acc) v /= n;
    return acc;
}

std::vector<double> pool_resized(const FeatureMap& fm, const BinaryMask& mask) {
    const int h = fm.height();
    const int w = fm.width();
    const auto ys = bilinear_axis(h, mask.height());
    const auto xs = bilinear_axis(w, mask.width());

    std::vector<double> weights(static_cast<std::size_t>(h) * w, 0.0);
    int row_lo = h, row_hi = -1, col_lo = w, col_hi = -1;
    mask.for_each_span([&](int row, int x0, int x1) {
        const auto& ay = ys[static_cast<std::size_t>(row)];
        double* top = weights.data() + static_cast<std::size_t>(ay.lo) * w;
        double* bottom = weights.data() + static_cast<std::size_t>(ay.hi) * w;
        const double wy_top = 1.0 - ay.frac;
        const double wy_bottom = ay.frac;
        for (int x = x0; x < x1; ++x) {
            const auto& ax = xs[static_cast<std::size_t>(x)];
            const double wl = 1.0 - ax.frac;
            const double wr = ax.frac;
            top[ax.lo] += wy_top * wl;
            top[ax.hi] += wy_top * wr;
            bottom[ax.lo] += wy_bottom * wl;
            bottom[ax.hi] += wy_bottom * wr;
        }
        row_lo = std::min(row_lo, ay.lo);
        row_hi = std::max(row_hi, ay.hi);
        col_lo = std::min(col_lo, xs[static_cast<std::size_t>(x0)].lo);
        col_hi = std::max(col_hi, xs[static_cast<std::size_t>(x1 - 1)].hi);
    });

    std::vector<double> acc(static_cast<std::size_t>(fm.depth()), 0.0);
    for (int y = row_lo; y <= row_hi; ++y) {
        for (int x = col_lo; x <= col_hi; ++x) {
            const double wgt = weights[static_cast<std::size_t>(y) * w + x];
            if (wgt == 0.0) continue;
            const auto cell = fm.cell(y, x);
            for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += wgt * cell[c];
        }
    }
    const double n = static_cast<double>(mask.foreground());
    for (double& v : acc) v /= n;
    return acc;
}

}  // namespace vqloc

#pragma once

namespace vqloc {

/// Axis-aligned box in continuous pixel coordinates, (x, y) at the top-left corner.
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    constexpr double right() const noexcept { return x + w; }
    constexpr double bottom() const noexcept { return y + h; }
    constexpr double area() const noexcept { return w * h; }
    constexpr double center_x() const noexcept { return x + 0.5 * w; }
    constexpr double center_y() const noexcept { return y + 0.5 * h; }
    constexpr bool valid() const noexcept { return w > 0.0 && h > 0.0; }

    friend constexpr bool operator==(const BBox&, const BBox&) = default;
};

double intersection_area(const BBox& a, const BBox& b) noexcept;

/// Intersection over union; 0 for disjoint or degenerate boxes.
double box_iou(const BBox& a, const BBox& b) noexcept;

/// Clip a box to [0, width] x [0, height]. The result may be degenerate.
BBox clamp_to_frame(const BBox& box, double width, double height) noexcept;

bool contains(const BBox& outer, const BBox& inner, double tolerance = 0.0) noexcept;

}  // namespace vqloc

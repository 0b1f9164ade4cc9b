#include "vqloc/geometry.hpp"

#include <algorithm>

namespace vqloc {

double intersection_area(const BBox& a, const BBox& b) noexcept {
    const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    return iw * ih;
}

double box_iou(const BBox& a, const BBox& b) noexcept {
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

BBox clamp_to_frame(const BBox& box, double width, double height) noexcept {
    const double x0 = std::clamp(box.x, 0.0, width);
    const double y0 = std::clamp(box.y, 0.0, height);
    const double x1 = std::clamp(box.right(), 0.0, width);
    const double y1 = std::clamp(box.bottom(), 0.0, height);
    return {x0, y0, std::max(0.0, x1 - x0), std::max(0.0, y1 - y0)};
}

bool contains(const BBox& outer, const BBox& inner, double tolerance) noexcept {
    return inner.x >= outer.x - tolerance && inner.y >= outer.y - tolerance &&
           inner.right() <= outer.right() + tolerance && inner.bottom() <= outer.bottom() + tolerance;
}

}  // namespace vqloc

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace vqloc {

inline double dot(std::span<const float> a, std::span<const float> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

inline double norm(std::span<const float> a) noexcept { return std::sqrt(dot(a, a)); }

/// Cosine similarity; 0 when either vector has zero norm.
inline double cosine(std::span<const float> a, std::span<const float> b) noexcept {
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

inline std::vector<float> to_float(std::span<const double> v) {
    return {v.begin(), v.end()};
}

}  // namespace vqloc

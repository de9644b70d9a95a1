#pragma once

#include <algorithm>
#include <cstdint>

namespace amodal {

struct ImageSize {
    int height = 0;
    int width = 0;

    friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

// Axis-aligned pixel rectangle, half-open on the max edges:
// pixel (x, y) is inside iff x_min <= x < x_max and y_min <= y < y_max.
struct BBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    int width() const { return x_max - x_min; }
    int height() const { return y_max - y_min; }
    long long area() const {
        return static_cast<long long>(width()) * static_cast<long long>(height());
    }

    bool valid() const { return x_min >= 0 && y_min >= 0 && x_min < x_max && y_min < y_max; }

    bool contains_point(int x, int y) const {
        return x >= x_min && x < x_max && y >= y_min && y < y_max;
    }
    bool contains(const BBox& other) const {
        return other.x_min >= x_min && other.y_min >= y_min &&
               other.x_max <= x_max && other.y_max <= y_max;
    }
    bool fits_within(const ImageSize& size) const {
        return valid() && x_max <= size.width && y_max <= size.height;
    }

    // Clamps to image bounds; the result may be degenerate (zero area) when the
    // box lies entirely outside.
    BBox clamped(const ImageSize& size) const {
        BBox out;
        out.x_min = std::clamp(x_min, 0, size.width);
        out.y_min = std::clamp(y_min, 0, size.height);
        out.x_max = std::clamp(x_max, 0, size.width);
        out.y_max = std::clamp(y_max, 0, size.height);
        out.x_max = std::max(out.x_max, out.x_min);
        out.y_max = std::max(out.y_max, out.y_min);
        return out;
    }

    friend bool operator==(const BBox&, const BBox&) = default;
};

inline BBox union_bbox(const BBox& a, const BBox& b) {
    return BBox{std::min(a.x_min, b.x_min), std::min(a.y_min, b.y_min),
                std::max(a.x_max, b.x_max), std::max(a.y_max, b.y_max)};
}

// Grows the box outward by fraction * (that box dimension) per side, then
// clamps to image bounds. fraction 0.10 on a 100px-wide box adds 10px on the
// left and 10px on the right.
BBox expand_bbox(const BBox& box, double fraction, const ImageSize& image);

}  // namespace amodal

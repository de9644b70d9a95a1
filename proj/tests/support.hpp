#pragma once

// Shared test helpers: a portable PRNG and brute-force per-pixel oracles the
// mask-algebra tests compare against. The oracles stay dumb on purpose: plain
// loops, no shortcuts, independent of the library implementations.

#include <cstdint>
#include <vector>

#include "amodal/bbox.hpp"
#include "amodal/image.hpp"
#include "amodal/mask.hpp"

namespace testsupport {

// SplitMix64: tiny, seedable, identical output on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [lo, hi] inclusive.
    int range(int lo, int hi) {
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

inline amodal::BinaryMask random_mask(Rng& rng, int h, int w, double density) {
    amodal::BinaryMask m(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (rng.unit() < density) m.set(y, x, true);
    return m;
}

// Random valid box fully inside (w, h).
inline amodal::BBox random_bbox(Rng& rng, int image_w, int image_h) {
    const int x0 = rng.range(0, image_w - 1);
    const int y0 = rng.range(0, image_h - 1);
    const int x1 = rng.range(x0 + 1, image_w);
    const int y1 = rng.range(y0 + 1, image_h);
    return amodal::BBox{x0, y0, x1, y1};
}

// --- brute-force oracles ------------------------------------------------

inline amodal::BinaryMask bf_intersect_bbox_mask(const amodal::BBox& box,
                                                 const amodal::BinaryMask& m) {
    amodal::BinaryMask out(m.height(), m.width());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            out.set(y, x, m.at(y, x) && box.contains_point(x, y));
    return out;
}

inline amodal::BinaryMask bf_union(const amodal::BinaryMask& a, const amodal::BinaryMask& b) {
    amodal::BinaryMask out(a.height(), a.width());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) out.set(y, x, a.at(y, x) || b.at(y, x));
    return out;
}

inline amodal::BinaryMask bf_intersect(const amodal::BinaryMask& a, const amodal::BinaryMask& b) {
    amodal::BinaryMask out(a.height(), a.width());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) out.set(y, x, a.at(y, x) && b.at(y, x));
    return out;
}

inline amodal::BinaryMask bf_invert(const amodal::BinaryMask& a) {
    amodal::BinaryMask out(a.height(), a.width());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) out.set(y, x, !a.at(y, x));
    return out;
}

inline double bf_iou(const amodal::BinaryMask& a, const amodal::BinaryMask& b) {
    long long inter = 0;
    long long uni = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            inter += a.at(y, x) && b.at(y, x);
            uni += a.at(y, x) || b.at(y, x);
        }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline bool bf_touches_boundary(const amodal::BinaryMask& m, const amodal::BBox& box, int band) {
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(y, x) || !box.contains_point(x, y)) continue;
            const int d_left = x - box.x_min;
            const int d_right = box.x_max - 1 - x;
            const int d_top = y - box.y_min;
            const int d_bottom = box.y_max - 1 - y;
            if (d_left < band || d_right < band || d_top < band || d_bottom < band) return true;
        }
    return false;
}

inline amodal::BBox bf_mask_to_bbox(const amodal::BinaryMask& m) {
    int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m.at(y, x)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    return amodal::BBox{x0, y0, x1 + 1, y1 + 1};
}

inline amodal::Image bf_compose(const amodal::Image& img, const amodal::BinaryMask& m,
                                amodal::RGB color) {
    amodal::Image out(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) out.set(y, x, m.at(y, x) ? img.at(y, x) : color);
    return out;
}

inline amodal::Image random_image(Rng& rng, int h, int w) {
    amodal::Image img(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.set(y, x, amodal::RGB{static_cast<std::uint8_t>(rng.range(0, 255)),
                                      static_cast<std::uint8_t>(rng.range(0, 255)),
                                      static_cast<std::uint8_t>(rng.range(0, 255))});
    return img;
}

}  // namespace testsupport

#pragma once

#include <cstdint>
#include <vector>

#include "amodal/bbox.hpp"
#include "amodal/mask.hpp"

namespace amodal {

struct RGB {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const RGB&, const RGB&) = default;
};

inline constexpr RGB kWhite{255, 255, 255};
inline constexpr RGB kGray{128, 128, 128};
inline constexpr RGB kRed{255, 0, 0};

// 8-bit RGB image, row-major interleaved.
class Image {
public:
    Image() = default;
    Image(int height, int width, RGB fill = RGB{});

    int height() const { return height_; }
    int width() const { return width_; }
    ImageSize size() const { return {height_, width_}; }

    RGB at(int y, int x) const {
        const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
        return {data_[i], data_[i + 1], data_[i + 2]};
    }
    void set(int y, int x, RGB c) {
        const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
        data_[i] = c.r;
        data_[i + 1] = c.g;
        data_[i + 2] = c.b;
    }

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> data_;
};

// Keeps image pixels where the mask is true, fills `color` elsewhere.
Image compose_on_background(const Image& image, const BinaryMask& mask, RGB color);

// Overwrites pixels inside the mask with `color`, keeps the rest.
Image fill_region(const Image& image, const BinaryMask& mask, RGB color);

struct CropResult {
    Image image;
    int offset_x = 0;  // maps crop (0,0) back to original (offset_x, offset_y)
    int offset_y = 0;
};

// Crop of the box grown by `margin` pixels per side, clamped to the image.
CropResult crop_with_margin(const Image& image, const BBox& box, int margin);

// Pastes src into dst at the given offset; parts falling outside dst are dropped.
void paste(Image& dst, const Image& src, int offset_x, int offset_y);

// Strokes a rectangle outline of the given thickness just outside the box
// edges (clamped to the image), so pixels inside the box are never painted.
void draw_box_outline(Image& image, const BBox& box, RGB color, int thickness);

// Pixels the outline stroke would paint, as a mask (same geometry as
// draw_box_outline).
BinaryMask box_outline_mask(const ImageSize& size, const BBox& box, int thickness);

}  // namespace amodal

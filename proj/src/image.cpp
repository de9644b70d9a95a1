#include "amodal/image.hpp"

#include <algorithm>

#include "amodal/errors.hpp"

namespace amodal {

Image::Image(int height, int width, RGB fill)
    : height_(height), width_(width), data_(static_cast<std::size_t>(height) * width * 3) {
    if (height < 1 || width < 1) throw InvalidInputError("Image: dimensions must be >= 1");
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill.r;
        data_[i + 1] = fill.g;
        data_[i + 2] = fill.b;
    }
}

Image compose_on_background(const Image& image, const BinaryMask& mask, RGB color) {
    if (image.size() != mask.size())
        throw InvalidInputError("compose_on_background: image and mask dimensions differ");
    Image out(image.height(), image.width(), color);
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            if (mask.at(y, x)) out.set(y, x, image.at(y, x));
    return out;
}

Image fill_region(const Image& image, const BinaryMask& mask, RGB color) {
    if (image.size() != mask.size())
        throw InvalidInputError("fill_region: image and mask dimensions differ");
    Image out = image;
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            if (mask.at(y, x)) out.set(y, x, color);
    return out;
}

CropResult crop_with_margin(const Image& image, const BBox& box, int margin) {
    if (margin < 0) throw InvalidInputError("crop_with_margin: margin must be >= 0");
    if (!box.fits_within(image.size()))
        throw InvalidInputError("crop_with_margin: box does not fit the image");
    const BBox region =
        BBox{box.x_min - margin, box.y_min - margin, box.x_max + margin, box.y_max + margin}
            .clamped(image.size());
    CropResult out{Image(region.height(), region.width()), region.x_min, region.y_min};
    for (int y = 0; y < region.height(); ++y)
        for (int x = 0; x < region.width(); ++x)
            out.image.set(y, x, image.at(region.y_min + y, region.x_min + x));
    return out;
}

void paste(Image& dst, const Image& src, int offset_x, int offset_y) {
    for (int y = 0; y < src.height(); ++y) {
        const int dy = y + offset_y;
        if (dy < 0 || dy >= dst.height()) continue;
        for (int x = 0; x < src.width(); ++x) {
            const int dx = x + offset_x;
            if (dx < 0 || dx >= dst.width()) continue;
            dst.set(dy, dx, src.at(y, x));
        }
    }
}

BinaryMask box_outline_mask(const ImageSize& size, const BBox& box, int thickness) {
    BinaryMask out(size.height, size.width);
    if (thickness < 1) return out;
    const BBox ring = BBox{box.x_min - thickness, box.y_min - thickness, box.x_max + thickness,
                           box.y_max + thickness}
                          .clamped(size);
    for (int y = ring.y_min; y < ring.y_max; ++y)
        for (int x = ring.x_min; x < ring.x_max; ++x)
            if (!box.contains_point(x, y)) out.set(y, x, true);
    return out;
}

void draw_box_outline(Image& image, const BBox& box, RGB color, int thickness) {
    const BinaryMask stroke = box_outline_mask(image.size(), box, thickness);
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            if (stroke.at(y, x)) image.set(y, x, color);
}

}  // namespace amodal

#include "amodal/mask.hpp"

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "amodal/errors.hpp"

namespace amodal {

namespace {

void require_same_size(const BinaryMask& a, const BinaryMask& b, const char* op) {
    if (a.height() != b.height() || a.width() != b.width())
        throw InvalidInputError(std::string(op) + ": mask dimensions differ");
}

}  // namespace

BinaryMask::BinaryMask(int height, int width, bool fill)
    : height_(height), width_(width),
      bits_(static_cast<std::size_t>(height) * width, fill ? 1 : 0) {
    if (height < 1 || width < 1) throw InvalidInputError("BinaryMask: dimensions must be >= 1");
}

BinaryMask BinaryMask::from_bits(int height, int width, std::vector<std::uint8_t> bits) {
    if (height < 1 || width < 1) throw InvalidInputError("BinaryMask: dimensions must be >= 1");
    if (bits.size() != static_cast<std::size_t>(height) * width)
        throw InvalidInputError("BinaryMask: bit buffer does not match dimensions");
    BinaryMask m;
    m.height_ = height;
    m.width_ = width;
    m.bits_ = std::move(bits);
    for (auto& b : m.bits_) b = b ? 1 : 0;
    return m;
}

std::size_t BinaryMask::count() const {
    return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
}

const char* to_string(OcclusionStratum s) {
    switch (s) {
        case OcclusionStratum::Easy: return "easy";
        case OcclusionStratum::Moderate: return "moderate";
        case OcclusionStratum::Hard: return "hard";
    }
    return "?";
}

BBox expand_bbox(const BBox& box, double fraction, const ImageSize& image) {
    if (fraction < 0.0) throw InvalidInputError("expand_bbox: fraction must be >= 0");
    const int dx = static_cast<int>(std::llround(fraction * box.width()));
    const int dy = static_cast<int>(std::llround(fraction * box.height()));
    const BBox grown{box.x_min - dx, box.y_min - dy, box.x_max + dx, box.y_max + dy};
    return grown.clamped(image);
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a, b, "mask_union");
    BinaryMask out = a;
    auto& bits = out.mutable_bits();
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = bits[i] | b.bits()[i];
    return out;
}

BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a, b, "mask_intersect");
    BinaryMask out = a;
    auto& bits = out.mutable_bits();
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = bits[i] & b.bits()[i];
    return out;
}

BinaryMask mask_subtract(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a, b, "mask_subtract");
    BinaryMask out = a;
    auto& bits = out.mutable_bits();
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = bits[i] & (1 - b.bits()[i]);
    return out;
}

BinaryMask mask_invert(const BinaryMask& a) {
    BinaryMask out = a;
    auto& bits = out.mutable_bits();
    for (auto& bit : bits) bit = 1 - bit;
    return out;
}

BinaryMask mask_dilate(const BinaryMask& a, int radius) {
    if (radius < 0) throw InvalidInputError("mask_dilate: radius must be >= 0");
    if (radius == 0) return a;
    BinaryMask out(a.height(), a.width());
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            if (!a.at(y, x)) continue;
            const int y0 = std::max(0, y - radius);
            const int y1 = std::min(a.height() - 1, y + radius);
            const int x0 = std::max(0, x - radius);
            const int x1 = std::min(a.width() - 1, x + radius);
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx) out.set(yy, xx, true);
        }
    }
    return out;
}

bool mask_subset(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a, b, "mask_subset");
    for (std::size_t i = 0; i < a.bits().size(); ++i)
        if (a.bits()[i] && !b.bits()[i]) return false;
    return true;
}

BinaryMask intersect_bbox_mask(const BBox& box, const BinaryMask& mask) {
    if (!box.valid() || !box.fits_within(mask.size()))
        throw InvalidInputError("intersect_bbox_mask: box does not fit the mask dimensions");
    BinaryMask out(mask.height(), mask.width());
    for (int y = box.y_min; y < box.y_max; ++y)
        for (int x = box.x_min; x < box.x_max; ++x)
            if (mask.at(y, x)) out.set(y, x, true);
    return out;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a, b, "iou");
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < a.bits().size(); ++i) {
        inter += a.bits()[i] & b.bits()[i];
        uni += a.bits()[i] | b.bits()[i];
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double occlusion_ratio(const BinaryMask& modal, const BinaryMask& amodal) {
    require_same_size(modal, amodal, "occlusion_ratio");
    if (!amodal.any()) throw InvalidInputError("occlusion_ratio: empty amodal mask");
    std::size_t modal_count = 0;
    std::size_t union_count = 0;
    for (std::size_t i = 0; i < modal.bits().size(); ++i) {
        modal_count += modal.bits()[i];
        union_count += modal.bits()[i] | amodal.bits()[i];
    }
    return 1.0 - static_cast<double>(modal_count) / static_cast<double>(union_count);
}

OcclusionStratum stratify(double ratio) {
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw InvalidInputError("stratify: occlusion ratio outside [0, 1]");
    if (ratio > 0.5) return OcclusionStratum::Hard;
    if (ratio < 0.2) return OcclusionStratum::Easy;
    return OcclusionStratum::Moderate;
}

bool touches_boundary(const BinaryMask& mask, const BBox& box, int band) {
    if (band < 1) throw InvalidInputError("touches_boundary: band must be >= 1");
    for (int y = box.y_min; y < box.y_max; ++y) {
        if (y < 0 || y >= mask.height()) continue;
        const bool y_edge = (y - box.y_min < band) || (box.y_max - 1 - y < band);
        for (int x = box.x_min; x < box.x_max; ++x) {
            if (x < 0 || x >= mask.width()) continue;
            if (!mask.at(y, x)) continue;
            if (y_edge || (x - box.x_min < band) || (box.x_max - 1 - x < band)) return true;
        }
    }
    return false;
}

BBox mask_to_bbox(const BinaryMask& mask) {
    int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(y, x)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) throw InvalidInputError("mask_to_bbox: empty mask");
    return BBox{x0, y0, x1 + 1, y1 + 1};
}

nlohmann::json mask_to_rle_json(const BinaryMask& mask) {
    nlohmann::json runs = nlohmann::json::array();
    const auto& bits = mask.bits();
    std::size_t i = 0;
    while (i < bits.size()) {
        if (!bits[i]) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < bits.size() && bits[i]) ++i;
        runs.push_back(start);
        runs.push_back(i - start);
    }
    return nlohmann::json{{"height", mask.height()}, {"width", mask.width()}, {"runs", runs}};
}

BinaryMask mask_from_rle_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("height") || !j.contains("width") || !j.contains("runs") ||
        !j["runs"].is_array() || j["runs"].size() % 2 != 0)
        throw InvalidInputError("mask_from_rle_json: malformed RLE object");
    const int h = j["height"].get<int>();
    const int w = j["width"].get<int>();
    BinaryMask m(h, w);
    auto& bits = m.mutable_bits();
    const auto& runs = j["runs"];
    for (std::size_t k = 0; k + 1 < runs.size(); k += 2) {
        const std::size_t start = runs[k].get<std::size_t>();
        const std::size_t len = runs[k + 1].get<std::size_t>();
        if (start + len > bits.size())
            throw InvalidInputError("mask_from_rle_json: run exceeds mask size");
        for (std::size_t i = start; i < start + len; ++i) bits[i] = 1;
    }
    return m;
}

}  // namespace amodal

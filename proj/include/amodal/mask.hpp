#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amodal/bbox.hpp"

#include <nlohmann/json_fwd.hpp>

namespace amodal {

// 2D boolean grid over image pixels, row-major. Values are stored as 0/1
// bytes; masks are small enough at pipeline scale that compactness does not
// pay for the addressing cost.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int height, int width, bool fill = false);
    static BinaryMask from_bits(int height, int width, std::vector<std::uint8_t> bits);

    int height() const { return height_; }
    int width() const { return width_; }
    ImageSize size() const { return {height_, width_}; }

    bool at(int y, int x) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int y, int x, bool value) {
        bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
    }

    std::size_t count() const;
    bool any() const { return count() > 0; }

    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::vector<std::uint8_t>& mutable_bits() { return bits_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> bits_;
};

enum class OcclusionStratum { Easy, Moderate, Hard };

const char* to_string(OcclusionStratum s);

// --- mask set algebra -------------------------------------------------------

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_subtract(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_invert(const BinaryMask& a);

// Chebyshev (square structuring element) dilation by `radius` pixels.
BinaryMask mask_dilate(const BinaryMask& a, int radius);

bool mask_subset(const BinaryMask& a, const BinaryMask& b);

// Output pixel is true iff the input pixel is true and lies inside the box.
// The box must sit within the mask dimensions.
BinaryMask intersect_bbox_mask(const BBox& box, const BinaryMask& mask);

// |a ∩ b| / |a ∪ b|, defined as 1.0 when both masks are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

// 1 - |modal| / |modal ∪ amodal|. The modal mask is unioned into the amodal
// mask first so slight annotation noise cannot push the ratio out of [0, 1].
double occlusion_ratio(const BinaryMask& modal, const BinaryMask& amodal);

// ratio > 0.5 -> Hard, ratio < 0.2 -> Easy, Moderate otherwise; the 0.2 and
// 0.5 boundaries land in Moderate.
OcclusionStratum stratify(double ratio);

// True iff any true pixel of the mask lies inside the box within `band`
// pixels of one of its edges.
bool touches_boundary(const BinaryMask& mask, const BBox& box, int band);

// Tightest half-open box containing all true pixels. Errors on empty masks.
BBox mask_to_bbox(const BinaryMask& mask);

// --- serialization ----------------------------------------------------------

// Compact run-length form {"height": H, "width": W, "runs": [start, len, ...]}
// with runs indexing the row-major flattened grid.
nlohmann::json mask_to_rle_json(const BinaryMask& mask);
BinaryMask mask_from_rle_json(const nlohmann::json& j);

}  // namespace amodal

#pragma once

#include <vector>

#include "amodal/backends.hpp"
#include "amodal/image.hpp"
#include "amodal/mask.hpp"

namespace amodal {

// Segments found to occlude the target, plus the region to hand the
// inpainter: their union with the visible target pixels removed.
struct OccluderSet {
    std::vector<BinaryMask> masks;
    BinaryMask inpaint_mask;
};

struct OccluderParams {
    int adjacency_radius_px = 5;       // ring around the modal mask tying segments to the target
    double inside_modal_threshold = 0.8;  // above this overlap a segment is a target sub-part
};

// Union of the given occluder masks minus the modal mask; visible target
// pixels are never repainted.
BinaryMask build_inpaint_mask(const std::vector<BinaryMask>& occluders, const BinaryMask& modal);

// Full-scene segmentation, filtered to segments adjacent to (but not mostly
// inside) the target, kept when the order predictor marks them as occluding
// it. Zero candidates is a valid unoccluded result.
OccluderSet detect_occluders(const Image& image, const BinaryMask& modal, Segmenter& segmenter,
                             OcclusionOrderPredictor& order_predictor,
                             const OccluderParams& params = {});

}  // namespace amodal

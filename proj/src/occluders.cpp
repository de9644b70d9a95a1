#include "amodal/occluders.hpp"

#include "amodal/errors.hpp"

namespace amodal {

BinaryMask build_inpaint_mask(const std::vector<BinaryMask>& occluders, const BinaryMask& modal) {
    BinaryMask out(modal.height(), modal.width());
    for (const auto& occluder : occluders) out = mask_union(out, occluder);
    return mask_subtract(out, modal);
}

OccluderSet detect_occluders(const Image& image, const BinaryMask& modal, Segmenter& segmenter,
                             OcclusionOrderPredictor& order_predictor,
                             const OccluderParams& params) {
    if (!modal.any()) throw InvalidInputError("detect_occluders: empty modal mask");
    if (image.size() != modal.size())
        throw InvalidInputError("detect_occluders: image and modal dimensions differ");

    const BinaryMask reach = mask_dilate(modal, params.adjacency_radius_px);

    std::vector<BinaryMask> candidates;
    for (auto& segment : segmenter.segment_all(image)) {
        if (segment.size() != modal.size()) continue;
        const std::size_t segment_area = segment.count();
        if (segment_area == 0) continue;
        if (!mask_intersect(segment, reach).any()) continue;
        const double inside = static_cast<double>(mask_intersect(segment, modal).count()) /
                              static_cast<double>(segment_area);
        if (inside > params.inside_modal_threshold) continue;  // target sub-part, not an occluder
        candidates.push_back(std::move(segment));
    }

    OccluderSet out;
    if (candidates.empty()) {
        out.inpaint_mask = BinaryMask(modal.height(), modal.width());
        return out;
    }

    // masks[0] is the target; candidate k sits at k+1
    std::vector<BinaryMask> query;
    query.reserve(candidates.size() + 1);
    query.push_back(modal);
    for (const auto& candidate : candidates) query.push_back(candidate);
    const OrderMatrix order = order_predictor.predict_order(image, query);

    for (std::size_t k = 0; k < candidates.size(); ++k)
        if (order.at(static_cast<int>(k) + 1, 0) == OrderRelation::FirstOccludesSecond)
            out.masks.push_back(candidates[k]);

    out.inpaint_mask = build_inpaint_mask(out.masks, modal);
    return out;
}

}  // namespace amodal

#include "amodal/inpaint.hpp"

#include <algorithm>

#include "amodal/errors.hpp"

namespace amodal {

std::pair<Image, BinaryMask> complete_once(Segmenter& segmenter, Inpainter& inpainter,
                                           const Image& image, const BinaryMask& modal,
                                           const BinaryMask& inpaint_mask,
                                           const std::string& prompt, RGB canvas_gray) {
    if (!modal.any()) throw InvalidInputError("complete_once: empty modal mask");
    if (mask_intersect(inpaint_mask, modal).any())
        throw InvalidInputError("complete_once: inpaint mask overlaps visible target pixels");

    const Image canvas = compose_on_background(image, modal, canvas_gray);
    const Image painted =
        inpaint_mask.any() ? inpainter.inpaint(canvas, inpaint_mask, prompt) : canvas;

    // corners of the gray canvas are background by construction
    const std::vector<PixelPoint> corners{{0, 0},
                                          {painted.width() - 1, 0},
                                          {0, painted.height() - 1},
                                          {painted.width() - 1, painted.height() - 1}};
    const BinaryMask background = segmenter.segment_region(painted, corners);
    const BinaryMask amodal = mask_union(mask_invert(background), modal);
    return {painted, amodal};
}

CompletionResult multiscale_complete(Segmenter& segmenter, Inpainter& inpainter,
                                     const Image& image, const BinaryMask& modal,
                                     const BinaryMask& inpaint_mask, const MultiScaleBoxes& boxes,
                                     const PromptSelection& prompt, const InpaintParams& params) {
    std::vector<std::pair<std::string, BBox>> scales;
    if (boxes.source == BoxSource::Fallback) {
        scales.emplace_back("fallback", boxes.tight);
    } else {
        const std::array<const char*, 3> names{"tight", "moderate", "coarse"};
        const std::array<BBox, 3> all = boxes.scales();
        const int limit = std::clamp(params.scale_limit, 1, 3);
        for (int i = 0; i < limit; ++i) scales.emplace_back(names[i], all[i]);
    }

    CompletionResult result;
    result.prompt = prompt;
    bool have_result = false;

    for (const auto& [label, box] : scales) {
        const BinaryMask resized = resize_inpaint_mask(box, inpaint_mask);
        ScaleTrace trace;
        trace.scale = label;
        trace.inpaint_area = resized.count();
        try {
            auto [painted, amodal] =
                complete_once(segmenter, inpainter, image, modal, resized, prompt.text,
                              params.canvas_gray);
            trace.touched_boundary = touches_boundary(amodal, box, params.boundary_band_px);
            result.trace.push_back(trace);
            result.amodal_image = std::move(painted);
            result.amodal_mask = std::move(amodal);
            result.chosen_scale = label;
            have_result = true;
            if (!trace.touched_boundary) {
                result.incomplete = false;
                return result;  // first scale that completes without touching wins
            }
        } catch (const BackendError& e) {
            trace.ok = false;
            trace.error = e.what();
            result.trace.push_back(trace);
        }
    }

    if (!have_result)
        throw CompletionFailedError("multiscale_complete: every scale failed");
    result.incomplete = true;  // all usable scales touched their box boundary
    return result;
}

}  // namespace amodal

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "amodal/backends.hpp"
#include "amodal/geometric.hpp"
#include "amodal/image.hpp"
#include "amodal/mask.hpp"
#include "amodal/semantic.hpp"

namespace amodal {

struct ScaleTrace {
    std::string scale;            // tight | moderate | coarse | fallback
    std::size_t inpaint_area = 0;
    bool touched_boundary = false;
    bool ok = true;
    std::string error;
};

struct CompletionResult {
    Image amodal_image;
    BinaryMask amodal_mask;       // always contains the modal mask
    PromptSelection prompt;
    std::string chosen_scale;
    bool incomplete = false;      // set when every scale touched its box boundary
    std::vector<ScaleTrace> trace;
};

struct InpaintParams {
    RGB canvas_gray = kGray;
    int boundary_band_px = 2;
    int scale_limit = 3;
};

// One completion pass: target composed on a gray canvas, inpainting inside the
// given region, background segmented from the four canvas corners, amodal mask
// as inverted background unioned with the modal mask. An empty region skips
// the inpainter call and segments the composed canvas directly.
std::pair<Image, BinaryMask> complete_once(Segmenter& segmenter, Inpainter& inpainter,
                                           const Image& image, const BinaryMask& modal,
                                           const BinaryMask& inpaint_mask,
                                           const std::string& prompt,
                                           RGB canvas_gray = kGray);

// Multi-scale expansion: walks the boxes smallest first, resizing the
// inpainting mask per box and accepting the first completion that does not
// touch its box boundary. Fallback-sourced boxes run a single pass. Per-scale
// backend failures are recorded in the trace and skipped; if no scale
// completes at all this throws CompletionFailedError.
CompletionResult multiscale_complete(Segmenter& segmenter, Inpainter& inpainter,
                                     const Image& image, const BinaryMask& modal,
                                     const BinaryMask& inpaint_mask, const MultiScaleBoxes& boxes,
                                     const PromptSelection& prompt,
                                     const InpaintParams& params = {});

}  // namespace amodal

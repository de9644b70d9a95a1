#pragma once

#include <array>
#include <string>
#include <vector>

#include "amodal/backends.hpp"
#include "amodal/image.hpp"
#include "amodal/mask.hpp"
#include "amodal/prompts.hpp"

namespace amodal {

enum class BoxSource { Mllm, Fallback };

// Full-object bbox predictions at three nested scales. After normalization
// tight ⊆ moderate ⊆ coarse, every box contains the modal bbox, and all boxes
// sit inside the image.
struct MultiScaleBoxes {
    BBox tight;
    BBox moderate;
    BBox coarse;
    BoxSource source = BoxSource::Fallback;
    bool degenerate_repaired = false;

    std::array<BBox, 3> scales() const { return {tight, moderate, coarse}; }

    friend bool operator==(const MultiScaleBoxes&, const MultiScaleBoxes&) = default;
};

const char* to_string(BoxSource s);

std::string format_box(const BBox& box);                  // "[x_min, y_min, x_max, y_max]"
std::string format_boxes(const std::vector<BBox>& boxes); // one box per line

// Visual: full-size image with the target isolated on white and the modal
// bbox stroked red (no crop, so the model sees the original scale). User text
// carries the modal bbox, the image size as [height, width], and the category.
ChatVisionRequest build_geometric_prompt(const Image& image, const BinaryMask& modal,
                                         const std::string& category, const PromptSet& prompts,
                                         const DecodeParams& decode, int stroke_px = 3);

// Extracts the first three bracketed 4-number groups, in order, tolerating
// labels and prose around them. Fewer than three -> MalformedGuidanceError.
std::vector<BBox> parse_boxes(const std::string& text);

// Clamp to the image, union with the modal bbox (guidance may never cut off
// visible pixels), sort by area ascending, then enforce nesting by cumulative
// union. Degenerate boxes are replaced by the fallback expansion and flagged.
MultiScaleBoxes normalize_boxes(const std::vector<BBox>& raw, const BBox& modal_bbox,
                                const ImageSize& image, double margin_fraction = 0.10);

// All three scales = modal bbox grown by the fixed margin.
MultiScaleBoxes fallback_bbox(const BBox& modal_bbox, const ImageSize& image,
                              double margin_fraction = 0.10);

// The box-resizing step for the inpainting mask: intersection with the
// predicted full-object box, shrink-only.
BinaryMask resize_inpaint_mask(const BBox& box, const BinaryMask& inpaint);

// Full geometric-guidance call: prompt, chat, parse, normalize. On a
// malformed response it retries once with the same prompt, then falls back to
// the fixed-margin boxes.
MultiScaleBoxes predict_boxes(ChatVisionModel& chat_large, const Image& image,
                              const BinaryMask& modal, const std::string& category,
                              const PromptSet& prompts, const DecodeParams& decode,
                              double margin_fraction = 0.10, int stroke_px = 3,
                              std::string* raw_response_out = nullptr);

}  // namespace amodal

#pragma once

#include <string>

#include "amodal/backends.hpp"
#include "amodal/image.hpp"
#include "amodal/mask.hpp"
#include "amodal/prompts.hpp"

namespace amodal {

// Output of the guidance decision call: whether the object needs extensive
// completion, and its category. The raw response is kept verbatim for audit.
struct GuidanceDecision {
    bool requires_extensive_completion = true;
    std::string category = "object";
    std::string raw_response;
    bool parse_fallback_used = false;
};

// Target isolated on white, red box stroked around the modal bbox, then
// cropped with a pixel margin around that bbox.
Image build_decision_visual_prompt(const Image& image, const BinaryMask& modal,
                                   int crop_margin_px = 100, int stroke_px = 3);

// Total function: any unparseable or schema-violating text falls back to
// requires=true / category "object" with the fallback flag set, mirroring the
// prompt's uncertainty rule. Never throws.
GuidanceDecision parse_decision_json(const std::string& text);

GuidanceDecision decide(ChatVisionModel& chat_small, const Image& image, const BinaryMask& modal,
                        const PromptSet& prompts, const DecodeParams& decode,
                        int crop_margin_px = 100, int stroke_px = 3);

}  // namespace amodal

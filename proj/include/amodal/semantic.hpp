#pragma once

#include <optional>
#include <string>

#include "amodal/backends.hpp"
#include "amodal/decision.hpp"
#include "amodal/image.hpp"
#include "amodal/mask.hpp"
#include "amodal/prompts.hpp"

namespace amodal {

// The text prompt handed to the inpainter: either the generated long
// description or the plain category.
struct PromptSelection {
    enum class Kind { Long, Category };

    std::string text;
    Kind kind = Kind::Category;
    std::optional<std::string> raw_response;
};

const char* to_string(PromptSelection::Kind k);

// Scene context preserved, occluder pixels filled with the mask color, red
// box stroked around the modal bbox, cropped with the pixel margin. The
// stroke wins where it overlaps filled occluder pixels.
Image build_semantic_visual_prompt(const Image& image, const BinaryMask& modal,
                                   const BinaryMask& inpaint, RGB mask_color = kGray,
                                   int crop_margin_px = 100, int stroke_px = 3);

struct Description {
    std::string text;
    bool had_prefix = true;  // false when the model dropped the "Prompt:" scaffold
    std::string raw_response;
};

// Strips the leading "Prompt:" (case-insensitive), trims, and truncates to the
// character budget on a word boundary. Empty after stripping ->
// MalformedGuidanceError.
std::string parse_description(const std::string& text, int budget_chars = 300);

Description generate_description(ChatVisionModel& chat_large, const Image& image,
                                 const BinaryMask& modal, const BinaryMask& inpaint,
                                 const std::string& category, const PromptSet& prompts,
                                 const DecodeParams& decode, RGB mask_color = kGray,
                                 int crop_margin_px = 100, int stroke_px = 3,
                                 int budget_chars = 300);

// Case rule for the final prompt: the long description when guidance was
// invoked and generation succeeded, the category otherwise.
PromptSelection select_prompt(const GuidanceDecision& decision,
                              const std::optional<std::string>& long_description);

}  // namespace amodal

#include "amodal/decision.hpp"

#include <algorithm>
#include <cctype>

#include "amodal/errors.hpp"
#include "amodal/json_util.hpp"

namespace amodal {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Image build_decision_visual_prompt(const Image& image, const BinaryMask& modal,
                                   int crop_margin_px, int stroke_px) {
    if (!modal.any()) throw InvalidInputError("decision visual prompt: empty modal mask");
    const BBox bbox = mask_to_bbox(modal);
    Image visual = compose_on_background(image, modal, kWhite);
    draw_box_outline(visual, bbox, kRed, stroke_px);
    return crop_with_margin(visual, bbox, crop_margin_px).image;
}

GuidanceDecision parse_decision_json(const std::string& text) {
    GuidanceDecision out;
    out.raw_response = text;
    out.requires_extensive_completion = true;  // uncertainty resolves toward guidance
    out.category = "object";
    out.parse_fallback_used = true;

    const auto parsed = extract_first_json_object(text);
    if (!parsed) return out;

    bool fallback = false;
    const auto& j = *parsed;

    if (j.contains("requires_extensive_completion")) {
        const auto& field = j["requires_extensive_completion"];
        if (field.is_string()) {
            const std::string value = lower(trim(field.get<std::string>()));
            if (value == "yes")
                out.requires_extensive_completion = true;
            else if (value == "no")
                out.requires_extensive_completion = false;
            else
                fallback = true;
        } else if (field.is_boolean()) {
            out.requires_extensive_completion = field.get<bool>();
        } else {
            fallback = true;
        }
    } else {
        fallback = true;
    }

    if (j.contains("category") && j["category"].is_string() &&
        !trim(j["category"].get<std::string>()).empty()) {
        out.category = trim(j["category"].get<std::string>());
    } else {
        fallback = true;
    }

    out.parse_fallback_used = fallback;
    return out;
}

GuidanceDecision decide(ChatVisionModel& chat_small, const Image& image, const BinaryMask& modal,
                        const PromptSet& prompts, const DecodeParams& decode,
                        int crop_margin_px, int stroke_px) {
    ChatVisionRequest request;
    request.system_prompt = prompts.decision_system;
    request.user_prompt = prompts.decision_user;
    request.image = build_decision_visual_prompt(image, modal, crop_margin_px, stroke_px);
    request.decode = decode;
    return parse_decision_json(chat_small.chat(request));
}

}  // namespace amodal

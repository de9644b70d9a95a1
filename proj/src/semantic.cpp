#include "amodal/semantic.hpp"

#include <algorithm>
#include <cctype>

#include "amodal/errors.hpp"

namespace amodal {

const char* to_string(PromptSelection::Kind k) {
    return k == PromptSelection::Kind::Long ? "long" : "category";
}

Image build_semantic_visual_prompt(const Image& image, const BinaryMask& modal,
                                   const BinaryMask& inpaint, RGB mask_color,
                                   int crop_margin_px, int stroke_px) {
    if (!modal.any()) throw InvalidInputError("semantic visual prompt: empty modal mask");
    const BBox bbox = mask_to_bbox(modal);
    Image visual = fill_region(image, inpaint, mask_color);
    draw_box_outline(visual, bbox, kRed, stroke_px);  // stroke wins over the fill
    return crop_with_margin(visual, bbox, crop_margin_px).image;
}

std::string parse_description(const std::string& text, int budget_chars) {
    std::string body = text;
    // strip one leading "Prompt:" scaffold, case-insensitive
    const auto non_space = body.find_first_not_of(" \t\r\n");
    if (non_space != std::string::npos) body.erase(0, non_space);
    static const char prefix[] = "prompt:";
    if (body.size() >= 7) {
        std::string head = body.substr(0, 7);
        std::transform(head.begin(), head.end(), head.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (head == prefix) body.erase(0, 7);
    }
    const auto begin = body.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        throw MalformedGuidanceError("semantic response is empty after stripping the prefix");
    const auto end = body.find_last_not_of(" \t\r\n");
    body = body.substr(begin, end - begin + 1);

    if (static_cast<int>(body.size()) > budget_chars) {
        std::size_t cut = static_cast<std::size_t>(budget_chars);
        const std::size_t space = body.rfind(' ', cut);
        if (space != std::string::npos && space > 0) cut = space;
        body = body.substr(0, cut);
        while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back())))
            body.pop_back();
        if (body.empty())
            throw MalformedGuidanceError("semantic response is empty after truncation");
    }
    return body;
}

Description generate_description(ChatVisionModel& chat_large, const Image& image,
                                 const BinaryMask& modal, const BinaryMask& inpaint,
                                 const std::string& category, const PromptSet& prompts,
                                 const DecodeParams& decode, RGB mask_color,
                                 int crop_margin_px, int stroke_px, int budget_chars) {
    ChatVisionRequest request;
    request.system_prompt = prompts.semantic_system;
    request.user_prompt = render_template(prompts.semantic_user, "category",
                                          category.empty() ? "object" : category);
    request.image = build_semantic_visual_prompt(image, modal, inpaint, mask_color,
                                                 crop_margin_px, stroke_px);
    request.decode = decode;

    const std::string response = chat_large.chat(request);
    Description out;
    out.raw_response = response;
    out.text = parse_description(response, budget_chars);

    std::string head = response.substr(0, std::min<std::size_t>(response.size(), 32));
    std::transform(head.begin(), head.end(), head.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.had_prefix = head.find("prompt:") != std::string::npos;
    return out;
}

PromptSelection select_prompt(const GuidanceDecision& decision,
                              const std::optional<std::string>& long_description) {
    PromptSelection out;
    if (decision.requires_extensive_completion && long_description &&
        !long_description->empty()) {
        out.text = *long_description;
        out.kind = PromptSelection::Kind::Long;
    } else {
        out.text = decision.category.empty() ? "object" : decision.category;
        out.kind = PromptSelection::Kind::Category;
    }
    return out;
}

}  // namespace amodal

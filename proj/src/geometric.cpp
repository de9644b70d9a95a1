#include "amodal/geometric.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "amodal/errors.hpp"

namespace amodal {

const char* to_string(BoxSource s) {
    return s == BoxSource::Mllm ? "mllm" : "fallback";
}

std::string format_box(const BBox& box) {
    return "[" + std::to_string(box.x_min) + ", " + std::to_string(box.y_min) + ", " +
           std::to_string(box.x_max) + ", " + std::to_string(box.y_max) + "]";
}

std::string format_boxes(const std::vector<BBox>& boxes) {
    std::string out;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (i) out += "\n";
        out += format_box(boxes[i]);
    }
    return out;
}

ChatVisionRequest build_geometric_prompt(const Image& image, const BinaryMask& modal,
                                         const std::string& category, const PromptSet& prompts,
                                         const DecodeParams& decode, int stroke_px) {
    if (!modal.any()) throw InvalidInputError("geometric prompt: empty modal mask");
    if (category.empty()) throw InvalidInputError("geometric prompt: empty category");
    const BBox bbox = mask_to_bbox(modal);

    Image visual = compose_on_background(image, modal, kWhite);
    draw_box_outline(visual, bbox, kRed, stroke_px);

    const std::string image_size = "[" + std::to_string(image.height()) + ", " +
                                   std::to_string(image.width()) + "]";
    std::string user = prompts.geometric_user;
    user = render_template(std::move(user), "bbox", format_box(bbox));
    user = render_template(std::move(user), "image_size", image_size);
    user = render_template(std::move(user), "category", category);

    ChatVisionRequest request;
    request.system_prompt = prompts.geometric_system;
    request.user_prompt = std::move(user);
    request.image = std::move(visual);
    request.decode = decode;
    return request;
}

std::vector<BBox> parse_boxes(const std::string& text) {
    static const std::regex group(
        R"(\[\s*(-?\d+(?:\.\d+)?)\s*,\s*(-?\d+(?:\.\d+)?)\s*,\s*(-?\d+(?:\.\d+)?)\s*,\s*(-?\d+(?:\.\d+)?)\s*\])");
    std::vector<BBox> boxes;
    auto begin = std::sregex_iterator(text.begin(), text.end(), group);
    for (auto it = begin; it != std::sregex_iterator() && boxes.size() < 3; ++it) {
        const std::smatch& m = *it;
        BBox box;
        box.x_min = static_cast<int>(std::llround(std::stod(m[1].str())));
        box.y_min = static_cast<int>(std::llround(std::stod(m[2].str())));
        box.x_max = static_cast<int>(std::llround(std::stod(m[3].str())));
        box.y_max = static_cast<int>(std::llround(std::stod(m[4].str())));
        boxes.push_back(box);
    }
    if (boxes.size() < 3)
        throw MalformedGuidanceError("geometric response carries fewer than three boxes");
    return boxes;
}

MultiScaleBoxes fallback_bbox(const BBox& modal_bbox, const ImageSize& image,
                              double margin_fraction) {
    const BBox grown = expand_bbox(modal_bbox, margin_fraction, image);
    MultiScaleBoxes out;
    out.tight = grown;
    out.moderate = grown;
    out.coarse = grown;
    out.source = BoxSource::Fallback;
    return out;
}

MultiScaleBoxes normalize_boxes(const std::vector<BBox>& raw, const BBox& modal_bbox,
                                const ImageSize& image, double margin_fraction) {
    if (raw.size() != 3) throw InvalidInputError("normalize_boxes: expected exactly three boxes");

    const BBox repair = expand_bbox(modal_bbox, margin_fraction, image);
    bool repaired = false;
    std::array<BBox, 3> boxes;
    for (std::size_t i = 0; i < 3; ++i) {
        BBox box = raw[i].clamped(image);
        if (box.area() == 0) {
            box = repair;
            repaired = true;
        }
        boxes[i] = union_bbox(box, modal_bbox);
    }

    std::stable_sort(boxes.begin(), boxes.end(),
                     [](const BBox& a, const BBox& b) { return a.area() < b.area(); });
    boxes[1] = union_bbox(boxes[1], boxes[0]);
    boxes[2] = union_bbox(boxes[2], boxes[1]);

    MultiScaleBoxes out;
    out.tight = boxes[0];
    out.moderate = boxes[1];
    out.coarse = boxes[2];
    out.source = BoxSource::Mllm;
    out.degenerate_repaired = repaired;
    return out;
}

BinaryMask resize_inpaint_mask(const BBox& box, const BinaryMask& inpaint) {
    return intersect_bbox_mask(box, inpaint);
}

MultiScaleBoxes predict_boxes(ChatVisionModel& chat_large, const Image& image,
                              const BinaryMask& modal, const std::string& category,
                              const PromptSet& prompts, const DecodeParams& decode,
                              double margin_fraction, int stroke_px,
                              std::string* raw_response_out) {
    const ChatVisionRequest request =
        build_geometric_prompt(image, modal, category, prompts, decode, stroke_px);
    const BBox modal_bbox = mask_to_bbox(modal);

    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::string response = chat_large.chat(request);
        if (raw_response_out) *raw_response_out = response;
        try {
            return normalize_boxes(parse_boxes(response), modal_bbox, image.size(),
                                   margin_fraction);
        } catch (const MalformedGuidanceError&) {
            // retry once with the same prompt, then fall back
        }
    }
    return fallback_bbox(modal_bbox, image.size(), margin_fraction);
}

}  // namespace amodal

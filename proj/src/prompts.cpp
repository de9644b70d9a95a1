#include "amodal/prompts.hpp"

#include <fstream>
#include <sstream>

#include "amodal/errors.hpp"
#include "amodal/json_util.hpp"

namespace amodal {

namespace {

constexpr const char* kDecisionSystem =
    R"(You are an expert visual annotator. You are given an image where a red bounding box highlights a target subject. Follow these instructions carefully and output only a valid JSON object.

Instructions:

1. Determine amodal completion requirement:

   - Output "no" only if you are confident that the target object in the red box is already complete, minimally occluded, or cannot be further extended.

   - Otherwise, output "yes".

   - If you are uncertain, output "yes".

2. Identify the category name:

   - Output the category name of the target subject.

3. Do not include explanations, reasoning, or any text outside of the JSON.

Output format:

{
  "requires_extensive_completion": "yes" | "no",
  "category": str
}

Example output:

{
  "requires_extensive_completion": "yes",
  "category": "Bear"
}
)";

constexpr const char* kDecisionUser =
    "Inspect the target subject in the red box and return the JSON object.";

constexpr const char* kGeometricSystem =
    R"(You will be provided with an image of an object, the object's name, its visible bounding box in the format [x_min, y_min, x_max, y_max], and the size of the image as [height, width]. The bounding box is marked with a red box in the image. The object in the red box is partially obscured and your task is to estimate three bounding boxes for the entire object, including both the visible and invisible parts. Provide tight, moderate, and coarse bounding boxes for the full object in the format [x_min, y_min, x_max, y_max]. The tight bounding box should include minimal margin around the visible parts of the object. Just provide the three bounding boxes, without explanation.
)";

constexpr const char* kGeometricUser =
    R"(Bounding box coordinates: {bbox}
Image size: {image_size}
Object name: {category}
)";

constexpr const char* kSemanticSystem =
    R"(Your job is to speculate the obscured part of the object inside the red box in the image and provide a Stable Diffusion prompt about the hidden part, using no more than 77 tokens. Do not include the names of the occluders and descriptions of the background in the prompt, focusing solely on the object. Your response should only contain the prompt. Your response should begin with a prefix that says 'Prompt:'.
)";

constexpr const char* kSemanticUser =
    "The object inside the red box is a {category}. Speculate its hidden parts and provide the "
    "prompt.";

struct NamedField {
    const char* file;
    std::string PromptSet::* member;
};

constexpr NamedField kFields[] = {
    {"decision_system.txt", &PromptSet::decision_system},
    {"decision_user.txt", &PromptSet::decision_user},
    {"geometric_system.txt", &PromptSet::geometric_system},
    {"geometric_user.txt", &PromptSet::geometric_user},
    {"semantic_system.txt", &PromptSet::semantic_system},
    {"semantic_user.txt", &PromptSet::semantic_user},
};

}  // namespace

PromptSet PromptSet::defaults() {
    PromptSet p;
    p.decision_system = kDecisionSystem;
    p.decision_user = kDecisionUser;
    p.geometric_system = kGeometricSystem;
    p.geometric_user = kGeometricUser;
    p.semantic_system = kSemanticSystem;
    p.semantic_user = kSemanticUser;
    return p;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
    PromptSet p = defaults();
    for (const auto& field : kFields) {
        std::ifstream in(dir / field.file);
        if (!in) continue;
        std::ostringstream buffer;
        buffer << in.rdbuf();
        p.*(field.member) = buffer.str();
    }
    return p;
}

void PromptSet::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& field : kFields) {
        std::ofstream out(dir / field.file, std::ios::trunc);
        if (!out) throw Error("cannot write prompt template: " + (dir / field.file).string());
        out << this->*(field.member);
    }
}

std::string render_template(std::string text, const std::string& key, const std::string& value) {
    const std::string token = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
    return text;
}

std::string prompt_template_id(const std::string& text) {
    return to_hex(fnv1a64(text));
}

}  // namespace amodal

#include "amodal/backends.hpp"

#include "amodal/errors.hpp"

namespace amodal {

void BackendRegistry::require_pipeline_roles() const {
    std::string missing;
    auto note = [&missing](bool bound, const char* name) {
        if (!bound) {
            if (!missing.empty()) missing += ", ";
            missing += name;
        }
    };
    note(chat_small != nullptr, "chat_small");
    note(chat_large != nullptr, "chat_large");
    note(segmenter != nullptr, "segmenter");
    note(order_predictor != nullptr, "order_predictor");
    note(inpainter != nullptr, "inpainter");
    if (!missing.empty()) throw ConfigError("backend roles not bound: " + missing);
}

void validate_chat_request(const ChatVisionRequest& request) {
    if (request.system_prompt.empty()) throw InvalidInputError("chat request: empty system prompt");
    if (request.user_prompt.empty()) throw InvalidInputError("chat request: empty user prompt");
    if (request.decode.temperature < 0.0)
        throw InvalidInputError("chat request: negative temperature");
    if (request.image.height() < 1 || request.image.width() < 1)
        throw InvalidInputError("chat request: empty image");
}

}  // namespace amodal

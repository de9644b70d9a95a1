#pragma once

#include <memory>
#include <string>

#include "amodal/backends.hpp"

namespace amodal {

struct HttpOptions {
    std::string endpoint;        // scheme://host[:port]
    std::string api_key_env;     // env var holding the bearer token; "" = no auth
    int attempts = 3;            // total attempts per call
    int backoff_initial_ms = 1000;  // doubles after each failed attempt
    int timeout_s = 120;
};

// Chat-completions style client: messages with a system part and a user part
// carrying the prompt text plus the image as a base64 data URI. The reply is
// choices[0].message.content.
struct HttpChatOptions : HttpOptions {
    std::string model_id;
    std::string path = "/v1/chat/completions";
};

std::shared_ptr<ChatVisionModel> http_chat_backend(const HttpChatOptions& options);

// Simple JSON-over-HTTP protocol for the remaining model roles. Payloads carry
// PNGs as base64 strings:
//   POST /segment_all    {"image"}                      -> {"masks": [...]}
//   POST /segment_region {"image", "points"|"box"}      -> {"mask"}
//   POST /predict_order  {"image", "masks"}             -> {"relations": [[int]]}
//                        0 = none, 1 = row occludes col, 2 = col occludes row
//   POST /inpaint        {"image", "mask", "prompt"}    -> {"image"}
//   POST /classify       {"image", "labels"}            -> {"labels": ranked}
std::shared_ptr<Segmenter> http_segmenter_backend(const HttpOptions& options);
std::shared_ptr<OcclusionOrderPredictor> http_order_backend(const HttpOptions& options);
std::shared_ptr<Inpainter> http_inpainter_backend(const HttpOptions& options);
std::shared_ptr<ImageClassifier> http_classifier_backend(const HttpOptions& options);

}  // namespace amodal

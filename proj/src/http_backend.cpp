#include "amodal/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "amodal/errors.hpp"
#include "amodal/json_util.hpp"
#include "amodal/png_io.hpp"

namespace amodal {

namespace {

std::string resolve_auth(const std::string& env_name) {
    if (env_name.empty()) return {};
    const char* value = std::getenv(env_name.c_str());
    if (!value || !*value)
        throw BackendUnavailableError("api key env var not set: " + env_name, 0);
    return value;
}

// POSTs JSON with bounded retries and exponential backoff. Any transport or
// HTTP error counts as a failed attempt; the last status is surfaced.
nlohmann::json post_json(const HttpOptions& options, const std::string& path,
                         const nlohmann::json& payload) {
    const std::string body = payload.dump();
    const std::string auth = resolve_auth(options.api_key_env);

    int last_status = 0;
    std::string last_error;
    int backoff_ms = options.backoff_initial_ms;
    for (int attempt = 0; attempt < std::max(1, options.attempts); ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
        // one client per call: httplib clients do not take concurrent requests
        httplib::Client client(options.endpoint);
        client.set_connection_timeout(options.timeout_s, 0);
        client.set_read_timeout(options.timeout_s, 0);
        httplib::Headers headers;
        if (!auth.empty()) headers.emplace("Authorization", "Bearer " + auth);
        auto result = client.Post(path, headers, body, "application/json");
        if (!result) {
            last_status = 0;
            last_error = httplib::to_string(result.error());
            continue;
        }
        if (result->status < 200 || result->status >= 300) {
            last_status = result->status;
            last_error = "http status " + std::to_string(result->status);
            continue;
        }
        nlohmann::json parsed =
            nlohmann::json::parse(result->body, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded())
            throw MalformedResponseError("backend returned non-JSON body from " + path);
        return parsed;
    }
    throw BackendUnavailableError(
        "backend unreachable after " + std::to_string(options.attempts) + " attempts (" +
            last_error + "): " + options.endpoint + path,
        last_status);
}

std::string image_json_field(const Image& image) {
    const auto png = encode_png(image);
    return base64_encode(png);
}

std::string mask_json_field(const BinaryMask& mask) {
    const auto png = encode_png(mask);
    return base64_encode(png);
}

Image image_from_field(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_string())
        throw MalformedResponseError(std::string("backend response missing \"") + field + "\"");
    return decode_png_image(base64_decode(j[field].get<std::string>()));
}

BinaryMask mask_from_field(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_string())
        throw MalformedResponseError(std::string("backend response missing \"") + field + "\"");
    return decode_png_mask(base64_decode(j[field].get<std::string>()));
}

class HttpChatModel : public ChatVisionModel {
public:
    explicit HttpChatModel(HttpChatOptions options) : options_(std::move(options)) {}

    std::string chat(const ChatVisionRequest& request) override {
        validate_chat_request(request);
        const nlohmann::json payload{
            {"model", options_.model_id},
            {"max_tokens", request.decode.max_tokens},
            {"temperature", request.decode.temperature},
            {"messages",
             nlohmann::json::array(
                 {nlohmann::json{{"role", "system"}, {"content", request.system_prompt}},
                  nlohmann::json{
                      {"role", "user"},
                      {"content",
                       nlohmann::json::array(
                           {nlohmann::json{{"type", "text"}, {"text", request.user_prompt}},
                            nlohmann::json{
                                {"type", "image_url"},
                                {"image_url",
                                 nlohmann::json{{"url", "data:image/png;base64," +
                                                            image_json_field(request.image)}}}}})},
                  }})}};
        const nlohmann::json reply = post_json(options_, options_.path, payload);
        return extract_message_text(reply);
    }

    std::string id() const override { return options_.model_id; }

private:
    static std::string extract_message_text(const nlohmann::json& reply) {
        if (!reply.contains("choices") || !reply["choices"].is_array() ||
            reply["choices"].empty())
            throw MalformedResponseError("chat response has no choices");
        const auto& message = reply["choices"][0].value("message", nlohmann::json::object());
        const auto& content = message.contains("content") ? message["content"] : nlohmann::json();
        if (content.is_string()) return content.get<std::string>();
        if (content.is_array()) {
            // some servers answer with a list of typed parts
            std::string text;
            for (const auto& part : content)
                if (part.is_object() && part.value("type", "") == "text")
                    text += part.value("text", "");
            if (!text.empty()) return text;
        }
        throw MalformedResponseError("chat response carries no text content");
    }

    HttpChatOptions options_;
};

class HttpSegmenter : public Segmenter {
public:
    explicit HttpSegmenter(HttpOptions options) : options_(std::move(options)) {}

    std::vector<BinaryMask> segment_all(const Image& image) override {
        const nlohmann::json reply =
            post_json(options_, "/segment_all", {{"image", image_json_field(image)}});
        if (!reply.contains("masks") || !reply["masks"].is_array())
            throw MalformedResponseError("segment_all response missing \"masks\"");
        std::vector<BinaryMask> masks;
        for (const auto& m : reply["masks"])
            masks.push_back(decode_png_mask(base64_decode(m.get<std::string>())));
        return masks;
    }

    BinaryMask segment_region(const Image& image, const std::vector<PixelPoint>& seeds) override {
        nlohmann::json points = nlohmann::json::array();
        for (const auto& p : seeds) points.push_back({{"x", p.x}, {"y", p.y}});
        const nlohmann::json reply = post_json(
            options_, "/segment_region", {{"image", image_json_field(image)}, {"points", points}});
        return mask_from_field(reply, "mask");
    }

    BinaryMask segment_region(const Image& image, const BBox& box) override {
        const nlohmann::json reply =
            post_json(options_, "/segment_region",
                      {{"image", image_json_field(image)},
                       {"box", nlohmann::json::array({box.x_min, box.y_min, box.x_max, box.y_max})}});
        return mask_from_field(reply, "mask");
    }

private:
    HttpOptions options_;
};

class HttpOrderPredictor : public OcclusionOrderPredictor {
public:
    explicit HttpOrderPredictor(HttpOptions options) : options_(std::move(options)) {}

    OrderMatrix predict_order(const Image& image, const std::vector<BinaryMask>& masks) override {
        nlohmann::json mask_field = nlohmann::json::array();
        for (const auto& m : masks) mask_field.push_back(mask_json_field(m));
        const nlohmann::json reply = post_json(
            options_, "/predict_order", {{"image", image_json_field(image)}, {"masks", mask_field}});
        if (!reply.contains("relations") || !reply["relations"].is_array() ||
            reply["relations"].size() != masks.size())
            throw MalformedResponseError("predict_order response has a bad \"relations\" matrix");
        OrderMatrix matrix(static_cast<int>(masks.size()));
        for (int i = 0; i < matrix.size(); ++i) {
            const auto& row = reply["relations"][i];
            if (!row.is_array() || row.size() != masks.size())
                throw MalformedResponseError("predict_order response has a ragged matrix row");
            for (int j = 0; j < matrix.size(); ++j) {
                switch (row[j].get<int>()) {
                    case 0: break;
                    case 1: matrix.set(i, j, OrderRelation::FirstOccludesSecond); break;
                    case 2: matrix.set(i, j, OrderRelation::SecondOccludesFirst); break;
                    default:
                        throw MalformedResponseError("predict_order relation out of range");
                }
            }
        }
        return matrix;
    }

private:
    HttpOptions options_;
};

class HttpInpainter : public Inpainter {
public:
    explicit HttpInpainter(HttpOptions options) : options_(std::move(options)) {}

    Image inpaint(const Image& image, const BinaryMask& region,
                  const std::string& prompt) override {
        const nlohmann::json reply = post_json(options_, "/inpaint",
                                               {{"image", image_json_field(image)},
                                                {"mask", mask_json_field(region)},
                                                {"prompt", prompt}});
        return image_from_field(reply, "image");
    }

private:
    HttpOptions options_;
};

class HttpClassifier : public ImageClassifier {
public:
    explicit HttpClassifier(HttpOptions options) : options_(std::move(options)) {}

    std::vector<std::string> classify(const Image& image,
                                      const std::vector<std::string>& labels) override {
        const nlohmann::json reply = post_json(
            options_, "/classify", {{"image", image_json_field(image)}, {"labels", labels}});
        if (!reply.contains("labels") || !reply["labels"].is_array())
            throw MalformedResponseError("classify response missing ranked \"labels\"");
        return reply["labels"].get<std::vector<std::string>>();
    }

private:
    HttpOptions options_;
};

}  // namespace

std::shared_ptr<ChatVisionModel> http_chat_backend(const HttpChatOptions& options) {
    return std::make_shared<HttpChatModel>(options);
}

std::shared_ptr<Segmenter> http_segmenter_backend(const HttpOptions& options) {
    return std::make_shared<HttpSegmenter>(options);
}

std::shared_ptr<OcclusionOrderPredictor> http_order_backend(const HttpOptions& options) {
    return std::make_shared<HttpOrderPredictor>(options);
}

std::shared_ptr<Inpainter> http_inpainter_backend(const HttpOptions& options) {
    return std::make_shared<HttpInpainter>(options);
}

std::shared_ptr<ImageClassifier> http_classifier_backend(const HttpOptions& options) {
    return std::make_shared<HttpClassifier>(options);
}

}  // namespace amodal

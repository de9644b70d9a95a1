#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "amodal/cache.hpp"
#include "amodal/errors.hpp"
#include "amodal/http_backend.hpp"
#include "amodal/json_util.hpp"
#include "amodal/png_io.hpp"
#include "amodal/scripted.hpp"
#include "support.hpp"

using namespace amodal;
using testsupport::Rng;

namespace {

ChatVisionRequest make_request(const std::string& user, int seed = 1) {
    Rng rng(seed);
    return ChatVisionRequest{"system text", user, testsupport::random_image(rng, 4, 4), {}};
}

// Stub HTTP server bound to an ephemeral port for the lifetime of one test.
class ScopedServer {
public:
    ScopedServer() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~ScopedServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Server& get() { return server_; }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

HttpChatOptions fast_chat(const std::string& endpoint) {
    HttpChatOptions options;
    options.endpoint = endpoint;
    options.model_id = "stub-model";
    options.attempts = 3;
    options.backoff_initial_ms = 1;
    return options;
}

}  // namespace

TEST_CASE("scripted chat returns matches in order and tracks calls") {
    ScriptedChatModel model({{"Bounding box coordinates", "[1,2,3,4]\n[0,1,4,5]\n[0,0,6,6]"},
                             {"hello", "first"},
                             {"hello", "second"}},
                            "test");
    CHECK(model.chat(make_request("say hello please")) == "first");
    CHECK(model.chat(make_request("say hello please")) == "second");
    CHECK(model.chat(make_request("Bounding box coordinates: [9, 9, 12, 12]")) ==
          "[1,2,3,4]\n[0,1,4,5]\n[0,0,6,6]");
    CHECK(model.calls() == 3);
    CHECK_THROWS_AS(model.chat(make_request("say hello please")), ScriptExhaustedError);
}

TEST_CASE("scripted chat rejects empty scripts and empty prompts") {
    CHECK_THROWS_AS(ScriptedChatModel(std::vector<ScriptEntry>{}), InvalidInputError);
    ScriptedChatModel model(std::vector<ScriptEntry>{{"", "ok"}});
    CHECK_THROWS_AS(model.chat(make_request("")), InvalidInputError);
}

TEST_CASE("response cache calls the inner model exactly once per distinct request") {
    auto inner = std::make_shared<ScriptedChatModel>(
        std::vector<ScriptEntry>{{"", "answer-1"}, {"", "answer-2"}});
    auto store = std::make_shared<MemoryStore>();
    CachingChatModel cached(inner, store);

    const ChatVisionRequest request = make_request("the question", 7);
    CHECK(cached.chat(request) == "answer-1");
    CHECK(cached.chat(request) == "answer-1");
    CHECK(inner->calls() == 1);
    CHECK(cached.hits() == 1);

    // a one-pixel change must miss
    ChatVisionRequest changed = request;
    RGB c = changed.image.at(0, 0);
    c.r = static_cast<std::uint8_t>(c.r ^ 0xff);
    changed.image.set(0, 0, c);
    CHECK(cached.chat(changed) == "answer-2");
    CHECK(inner->calls() == 2);
}

TEST_CASE("response cache key is sensitive to decode params and model id") {
    const ChatVisionRequest request = make_request("q", 3);
    ChatVisionRequest hotter = request;
    hotter.decode.temperature = 0.7;
    CHECK(CachingChatModel::cache_key("m", request) != CachingChatModel::cache_key("m", hotter));
    CHECK(CachingChatModel::cache_key("m", request) != CachingChatModel::cache_key("n", request));
    CHECK(CachingChatModel::cache_key("m", request) == CachingChatModel::cache_key("m", request));
}

TEST_CASE("directory store persists across instances") {
    const auto dir = std::filesystem::temp_directory_path() / "amodal_cache_test";
    std::filesystem::remove_all(dir);
    const ChatVisionRequest request = make_request("persisted", 9);
    {
        auto inner = std::make_shared<ScriptedChatModel>(std::vector<ScriptEntry>{{"", "pinned"}});
        CachingChatModel cached(inner, std::make_shared<DirectoryStore>(dir));
        CHECK(cached.chat(request) == "pinned");
    }
    {
        // fresh process-equivalent: the scripted inner would throw if called
        auto inner = std::make_shared<ScriptedChatModel>(
            std::vector<ScriptEntry>{{"never-matches-anything", "x"}});
        CachingChatModel cached(inner, std::make_shared<DirectoryStore>(dir));
        CHECK(cached.chat(request) == "pinned");
        CHECK(inner->calls() == 0);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("http chat backend round-trips text and sends the documented shape") {
    ScopedServer server;
    nlohmann::json seen;
    std::string seen_auth;
    server.get().Post("/v1/chat/completions",
                      [&](const httplib::Request& req, httplib::Response& res) {
                          seen = nlohmann::json::parse(req.body);
                          seen_auth = req.get_header_value("Authorization");
                          res.set_content(
                              nlohmann::json{
                                  {"choices",
                                   {{{"message",
                                      {{"role", "assistant"}, {"content", "canned reply"}}}}}}}
                                  .dump(),
                              "application/json");
                      });

    setenv("AMODAL_TEST_KEY", "sekret", 1);
    HttpChatOptions options = fast_chat(server.endpoint());
    options.api_key_env = "AMODAL_TEST_KEY";
    auto model = http_chat_backend(options);

    Rng rng(5);
    const Image image = testsupport::random_image(rng, 6, 5);
    ChatVisionRequest request{"sys", "user text", image, {128, 0.25}};
    CHECK(model->chat(request) == "canned reply");

    CHECK(seen["model"] == "stub-model");
    CHECK(seen["temperature"] == 0.25);
    CHECK(seen["max_tokens"] == 128);
    CHECK(seen["messages"][0]["role"] == "system");
    CHECK(seen["messages"][0]["content"] == "sys");
    CHECK(seen["messages"][1]["content"][0]["text"] == "user text");
    CHECK(seen_auth == "Bearer sekret");

    // the image rides along as a decodable data URI
    const std::string uri = seen["messages"][1]["content"][1]["image_url"]["url"];
    const std::string prefix = "data:image/png;base64,";
    REQUIRE(uri.substr(0, prefix.size()) == prefix);
    CHECK(decode_png_image(base64_decode(uri.substr(prefix.size()))) == image);
}

TEST_CASE("http chat backend retries then reports backend-unavailable") {
    ScopedServer server;
    std::atomic<int> hits{0};
    server.get().Post("/v1/chat/completions",
                      [&](const httplib::Request&, httplib::Response& res) {
                          ++hits;
                          res.status = 500;
                      });
    auto model = http_chat_backend(fast_chat(server.endpoint()));
    try {
        model->chat(make_request("anything"));
        FAIL("expected BackendUnavailableError");
    } catch (const BackendUnavailableError& e) {
        CHECK(e.http_status() == 500);
    }
    CHECK(hits == 3);
}

TEST_CASE("http chat backend rejects bad requests before any network call") {
    std::atomic<int> hits{0};
    ScopedServer server;
    server.get().Post("/v1/chat/completions",
                      [&](const httplib::Request&, httplib::Response& res) {
                          ++hits;
                          res.set_content("{}", "application/json");
                      });
    auto model = http_chat_backend(fast_chat(server.endpoint()));
    CHECK_THROWS_AS(model->chat(make_request("")), InvalidInputError);
    ChatVisionRequest negative = make_request("ok");
    negative.decode.temperature = -1.0;
    CHECK_THROWS_AS(model->chat(negative), InvalidInputError);
    CHECK(hits == 0);
}

TEST_CASE("http chat backend flags non-text responses") {
    ScopedServer server;
    server.get().Post("/v1/chat/completions",
                      [&](const httplib::Request&, httplib::Response& res) {
                          res.set_content(R"({"choices":[{"message":{"content":null}}]})",
                                          "application/json");
                      });
    auto model = http_chat_backend(fast_chat(server.endpoint()));
    CHECK_THROWS_AS(model->chat(make_request("x")), MalformedResponseError);
}

TEST_CASE("http model-server protocol round-trips") {
    ScopedServer server;
    Rng rng(21);
    const Image image = testsupport::random_image(rng, 8, 8);
    const BinaryMask mask = testsupport::random_mask(rng, 8, 8, 0.5);

    server.get().Post("/segment_all", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        CHECK(decode_png_image(base64_decode(body["image"].get<std::string>())) == image);
        res.set_content(
            nlohmann::json{{"masks", {base64_encode(encode_png(mask))}}}.dump(),
            "application/json");
    });
    server.get().Post("/segment_region", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        CHECK((body.contains("points") || body["box"] == nlohmann::json::array({1, 2, 5, 6})));
        res.set_content(nlohmann::json{{"mask", base64_encode(encode_png(mask))}}.dump(),
                        "application/json");
    });
    server.get().Post("/predict_order", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        CHECK(body["masks"].size() == 2);
        res.set_content(R"({"relations":[[0,1],[2,0]]})", "application/json");
    });
    server.get().Post("/inpaint", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        CHECK(body["prompt"] == "a prompt");
        res.set_content(nlohmann::json{{"image", base64_encode(encode_png(image))}}.dump(),
                        "application/json");
    });
    server.get().Post("/classify", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        CHECK(body["labels"].size() == 3);
        res.set_content(R"({"labels":["b","a","c"]})", "application/json");
    });

    HttpOptions options;
    options.endpoint = server.endpoint();
    options.attempts = 1;

    CHECK(http_segmenter_backend(options)->segment_all(image) ==
          std::vector<BinaryMask>{mask});
    CHECK(http_segmenter_backend(options)->segment_region(image, {{0, 0}}) == mask);
    CHECK(http_segmenter_backend(options)->segment_region(image, BBox{1, 2, 5, 6}) == mask);
    const OrderMatrix matrix =
        http_order_backend(options)->predict_order(image, {mask, mask});
    CHECK(matrix.at(0, 1) == OrderRelation::FirstOccludesSecond);
    CHECK(matrix.at(1, 0) == OrderRelation::SecondOccludesFirst);
    CHECK(http_inpainter_backend(options)->inpaint(image, mask, "a prompt") == image);
    CHECK(http_classifier_backend(options)->classify(image, {"a", "b", "c"}) ==
          std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("order matrix keeps antisymmetry") {
    OrderMatrix m(3);
    m.set(0, 2, OrderRelation::FirstOccludesSecond);
    CHECK(m.at(2, 0) == OrderRelation::SecondOccludesFirst);
    m.set(0, 2, OrderRelation::None);
    CHECK(m.at(2, 0) == OrderRelation::None);
}

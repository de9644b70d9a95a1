#include "amodal/backend_factory.hpp"

#include <algorithm>
#include <filesystem>

#include "amodal/cache.hpp"
#include "amodal/errors.hpp"
#include "amodal/http_backend.hpp"
#include "amodal/scripted.hpp"
#include "amodal/synth.hpp"

namespace amodal {

namespace {

struct Builder {
    const Config& config;
    const PipelineConfig& pipeline_config;
    std::vector<SyntheticSample> oracle_samples;
    BackendRegistry oracle_registry;
    bool oracle_ready = false;

    std::string role_key(const std::string& role, const std::string& key) const {
        return "backends." + role + "." + key;
    }

    std::string kind_of(const std::string& role) const {
        if (auto specific = config.get(role_key(role, "kind"))) return *specific;
        return config.get_or("backends.kind", "");
    }

    std::string role_or_shared(const std::string& role, const std::string& key,
                               const std::string& fallback = {}) const {
        if (auto specific = config.get(role_key(role, key))) return *specific;
        return config.get_or("backends." + key, fallback);
    }

    int role_or_shared_int(const std::string& role, const std::string& key, int fallback) const {
        if (config.has(role_key(role, key))) return config.get_int(role_key(role, key), fallback);
        return config.get_int("backends." + key, fallback);
    }

    HttpOptions http_options(const std::string& role) const {
        HttpOptions options;
        options.endpoint = role_or_shared(role, "endpoint");
        if (options.endpoint.empty())
            throw ConfigError("backends." + role + ": http kind needs an endpoint");
        options.api_key_env = role_or_shared(role, "api_key_env");
        options.attempts = role_or_shared_int(role, "attempts", options.attempts);
        options.backoff_initial_ms =
            role_or_shared_int(role, "backoff_initial_ms", options.backoff_initial_ms);
        options.timeout_s = role_or_shared_int(role, "timeout_s", options.timeout_s);
        return options;
    }

    const BackendRegistry& oracle() {
        if (!oracle_ready) {
            const std::string dir = config.get_or("backends.oracle_samples", "");
            if (dir.empty())
                throw ConfigError("backends.oracle_samples must point at a synth sample root");
            if (!std::filesystem::is_directory(dir))
                throw ConfigError("backends.oracle_samples is not a directory: " + dir);
            std::vector<std::filesystem::path> dirs;
            for (const auto& entry :
                 std::filesystem::directory_iterator(std::filesystem::path(dir)))
                if (entry.is_directory() && std::filesystem::exists(entry.path() / "meta.json"))
                    dirs.push_back(entry.path());
            if (std::filesystem::exists(std::filesystem::path(dir) / "meta.json"))
                dirs.push_back(dir);  // a single sample directory works too
            std::sort(dirs.begin(), dirs.end());
            std::vector<SyntheticSample> samples;
            for (const auto& sample_dir : dirs) samples.push_back(load_sample(sample_dir));
            if (samples.empty())
                throw ConfigError("no synth samples under " + dir);
            OracleOptions options;
            options.canvas_gray = pipeline_config.gray();
            options.crop_margin_px = pipeline_config.crop_margin_px;
            options.stroke_px = pipeline_config.stroke_px;
            options.occluder_params = pipeline_config.occluders;
            options.requires_threshold =
                config.get_double("backends.oracle.requires_threshold", 0.2);
            options.tight_margin_px = config.get_int("backends.oracle.tight_margin_px", 4);
            options.moderate_margin_px = config.get_int("backends.oracle.moderate_margin_px", 10);
            options.coarse_margin_px = config.get_int("backends.oracle.coarse_margin_px", 18);
            oracle_registry = oracle_backends(samples, options);
            oracle_samples = std::move(samples);
            oracle_ready = true;
        }
        return oracle_registry;
    }

    std::shared_ptr<ChatVisionModel> chat(const std::string& role) {
        const std::string kind = kind_of(role);
        std::shared_ptr<ChatVisionModel> model;
        if (kind == "http") {
            HttpChatOptions options;
            static_cast<HttpOptions&>(options) = http_options(role);
            options.model_id = role_or_shared(role, "model", "default");
            options.path = role_or_shared(role, "path", options.path);
            model = http_chat_backend(options);
        } else if (kind == "scripted") {
            const std::string script = config.get_or(role_key(role, "script"), "");
            if (script.empty())
                throw ConfigError("backends." + role + ": scripted kind needs a script file");
            model = std::make_shared<ScriptedChatModel>(load_script(script), role);
        } else if (kind == "oracle") {
            model = role == "chat_small" ? oracle().chat_small : oracle().chat_large;
        } else {
            throw ConfigError("backends." + role + ": unknown kind \"" + kind + "\"");
        }

        if (config.get_bool("cache.enabled", false)) {
            const std::string dir = config.get_or("cache.dir", ".amodal_cache");
            model = std::make_shared<CachingChatModel>(model,
                                                       std::make_shared<DirectoryStore>(dir));
        }
        return model;
    }
};

}  // namespace

BackendRegistry make_backends(const Config& config, const PipelineConfig& pipeline_config) {
    Builder builder{config, pipeline_config, {}, {}, false};
    BackendRegistry registry;

    registry.chat_small = builder.chat("chat_small");
    registry.chat_large = builder.chat("chat_large");

    for (const char* role : {"segmenter", "order_predictor", "inpainter", "classifier"}) {
        const std::string kind = builder.kind_of(role);
        if (kind == "none" || (kind.empty() && std::string(role) == "classifier")) continue;
        if (kind == "http") {
            const HttpOptions options = builder.http_options(role);
            if (std::string(role) == "segmenter")
                registry.segmenter = http_segmenter_backend(options);
            else if (std::string(role) == "order_predictor")
                registry.order_predictor = http_order_backend(options);
            else if (std::string(role) == "inpainter")
                registry.inpainter = http_inpainter_backend(options);
            else
                registry.classifier = http_classifier_backend(options);
        } else if (kind == "oracle") {
            const BackendRegistry& oracle = builder.oracle();
            if (std::string(role) == "segmenter")
                registry.segmenter = oracle.segmenter;
            else if (std::string(role) == "order_predictor")
                registry.order_predictor = oracle.order_predictor;
            else if (std::string(role) == "inpainter")
                registry.inpainter = oracle.inpainter;
            else
                registry.classifier = oracle.classifier;
        } else {
            throw ConfigError(std::string("backends.") + role + ": unknown kind \"" + kind +
                              "\"");
        }
    }
    return registry;
}

}  // namespace amodal

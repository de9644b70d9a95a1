#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "amodal/backend_factory.hpp"
#include "amodal/cache.hpp"
#include "amodal/errors.hpp"
#include "amodal/pipeline.hpp"
#include "amodal/synth.hpp"

using namespace amodal;
namespace fs = std::filesystem;

namespace {

struct SuiteDir {
    fs::path root;
    SuiteDir() {
        root = fs::temp_directory_path() / "amodal_factory_suite";
        fs::remove_all(root);
        for (std::uint64_t seed = 0; seed < 2; ++seed) {
            SceneSpec spec;
            spec.min_occlusion = 0.3;
            spec.max_occlusion = 0.8;
            const SyntheticSample sample = gen_scene(spec, seed);
            save_sample(sample, root / sample.sample_id);
        }
    }
    ~SuiteDir() { fs::remove_all(root); }
};

}  // namespace

TEST_CASE("factory builds a full oracle registry from config") {
    SuiteDir suite;
    Config config = Config::parse_string("[backends]\nkind = oracle\n");
    config.set("backends.oracle_samples", suite.root.string());
    const BackendRegistry registry = make_backends(config, PipelineConfig{});
    CHECK_NOTHROW(registry.require_pipeline_roles());
    CHECK(registry.classifier != nullptr);
    CHECK(registry.chat_small->id() == "oracle-chat");
}

TEST_CASE("factory builds scripted chat roles and wraps them in a cache") {
    SuiteDir suite;
    const fs::path script = suite.root / "script.json";
    std::ofstream(script) << R"([{"match": "", "response": "hello"}])";

    Config config = Config::parse_string(
        "[backends]\nkind = oracle\n"
        "[backends.chat_small]\nkind = scripted\n"
        "[backends.chat_large]\nkind = scripted\n"
        "[cache]\nenabled = true\n");
    config.set("backends.oracle_samples", suite.root.string());
    config.set("backends.chat_small.script", script.string());
    config.set("backends.chat_large.script", script.string());
    config.set("cache.dir", (suite.root / "cache").string());

    const BackendRegistry registry = make_backends(config, PipelineConfig{});
    // the cache wrapper preserves the inner model id
    CHECK(registry.chat_small->id() == "chat_small");
    CHECK(std::dynamic_pointer_cast<CachingChatModel>(registry.chat_small) != nullptr);
}

TEST_CASE("factory rejects misconfigured roles with clear errors") {
    Config missing_kind = Config::parse_string("[backends.chat_small]\nkind = bogus\n");
    CHECK_THROWS_AS(make_backends(missing_kind, PipelineConfig{}), ConfigError);

    Config http_no_endpoint = Config::parse_string("[backends]\nkind = http\n");
    CHECK_THROWS_AS(make_backends(http_no_endpoint, PipelineConfig{}), ConfigError);

    Config oracle_no_samples = Config::parse_string("[backends]\nkind = oracle\n");
    CHECK_THROWS_AS(make_backends(oracle_no_samples, PipelineConfig{}), ConfigError);
}

TEST_CASE("factory builds http registries without touching the network") {
    Config config = Config::parse_string(
        "[backends]\nkind = http\nendpoint = http://localhost:1\n"
        "[backends.chat_small]\nmodel = small\n"
        "[backends.chat_large]\nmodel = large\n");
    const BackendRegistry registry = make_backends(config, PipelineConfig{});
    CHECK_NOTHROW(registry.require_pipeline_roles());
    CHECK(registry.chat_small->id() == "small");
    CHECK(registry.chat_large->id() == "large");
}

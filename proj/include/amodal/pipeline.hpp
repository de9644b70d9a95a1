#pragma once

#include <optional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "amodal/backends.hpp"
#include "amodal/config.hpp"
#include "amodal/decision.hpp"
#include "amodal/geometric.hpp"
#include "amodal/image.hpp"
#include "amodal/inpaint.hpp"
#include "amodal/mask.hpp"
#include "amodal/occluders.hpp"
#include "amodal/prompts.hpp"
#include "amodal/semantic.hpp"

namespace amodal {

// One completion job: the input image, the visible mask of the target, and an
// optional known category that overrides whatever the decision model says.
struct TargetSpec {
    std::string sample_id;
    Image image;
    BinaryMask modal;
    std::optional<std::string> category_hint;
};

struct PipelineConfig {
    double margin_fraction = 0.10;   // fixed bbox margin when guidance is skipped
    int crop_margin_px = 100;        // visual-prompt crop margin
    int boundary_band_px = 2;        // completeness check band
    int gray_value = 128;            // inpainting canvas background
    int scale_limit = 3;             // guidance box scales tried, smallest first
    int stroke_px = 3;               // red box stroke width
    OccluderParams occluders{};
    int parallelism = 4;
    int description_budget_chars = 300;
    DecodeParams decision_decode{256, 0.0};
    DecodeParams geometric_decode{512, 0.0};
    DecodeParams semantic_decode{512, 0.7};
    bool include_timings = false;    // timings in serialized records are opt-in
    std::string prompts_dir;         // empty = compiled-in templates

    static PipelineConfig from_config(const Config& config);
    void validate() const;  // throws ConfigError on out-of-range fields

    RGB gray() const {
        const auto v = static_cast<std::uint8_t>(gray_value);
        return RGB{v, v, v};
    }
    InpaintParams inpaint_params() const {
        return InpaintParams{gray(), boundary_band_px, scale_limit};
    }
};

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

struct BackendCallCounts {
    int chat_small = 0;
    int chat_large = 0;
    int segment_all = 0;
    int segment_region = 0;
    int predict_order = 0;
    int inpaint = 0;

    friend bool operator==(const BackendCallCounts&, const BackendCallCounts&) = default;
};

// Complete audit trail of one pipeline run. Stages are present iff they
// executed; the semantic stage is absent whenever guidance was skipped.
struct RunRecord {
    static constexpr int kSchemaVersion = 1;

    std::string sample_id;
    std::string status = "ok";  // ok | error
    std::string error;
    std::optional<GuidanceDecision> decision;
    bool decision_stage_failed = false;  // backend failure, fell back toward guidance
    bool geometric_backend_failed = false;
    std::optional<MultiScaleBoxes> boxes;
    std::optional<std::string> geometric_raw_response;
    std::optional<std::string> long_description;  // present only when generated
    std::optional<std::string> semantic_raw_response;
    std::optional<PromptSelection> prompt;
    std::optional<CompletionResult> result;
    BinaryMask inpaint_mask;  // detected occluder union minus the modal mask
    BackendCallCounts calls;
    std::map<std::string, std::string> prompt_template_ids;  // stage -> template hash
    std::vector<StageTiming> timings;
    nlohmann::ordered_json config_echo;            // filled by the CLI
    std::map<std::string, std::string> files;      // artifact paths, filled by the CLI

    nlohmann::ordered_json to_json(bool include_timings) const;
};

// Fig-flow orchestration for one sample: occluder detection, guidance
// decision, geometric (and, when invoked, semantic) guidance, multi-scale
// completion. Total: backend failures degrade or surface as an error-status
// record, never as an exception.
RunRecord run(const PipelineConfig& config, const BackendRegistry& backends,
              const TargetSpec& spec, const PromptSet& prompts = PromptSet::defaults());

// Bounded-parallel map of run over the specs; output order matches input
// order and per-sample failures stay isolated.
std::vector<RunRecord> run_batch(const PipelineConfig& config, const BackendRegistry& backends,
                                 const std::vector<TargetSpec>& specs,
                                 const PromptSet& prompts = PromptSet::defaults());

}  // namespace amodal

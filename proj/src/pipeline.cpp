#include "amodal/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include "amodal/errors.hpp"

namespace amodal {

PipelineConfig PipelineConfig::from_config(const Config& config) {
    PipelineConfig out;
    out.margin_fraction = config.get_double("pipeline.margin_fraction", out.margin_fraction);
    out.crop_margin_px = config.get_int("pipeline.crop_margin_px", out.crop_margin_px);
    out.boundary_band_px = config.get_int("pipeline.boundary_band_px", out.boundary_band_px);
    out.gray_value = config.get_int("pipeline.gray_value", out.gray_value);
    out.scale_limit = config.get_int("pipeline.scale_limit", out.scale_limit);
    out.stroke_px = config.get_int("pipeline.stroke_px", out.stroke_px);
    out.occluders.adjacency_radius_px =
        config.get_int("pipeline.adjacency_radius_px", out.occluders.adjacency_radius_px);
    out.occluders.inside_modal_threshold = config.get_double(
        "pipeline.inside_modal_threshold", out.occluders.inside_modal_threshold);
    out.parallelism = config.get_int("pipeline.parallelism", out.parallelism);
    out.description_budget_chars =
        config.get_int("pipeline.description_budget_chars", out.description_budget_chars);
    out.decision_decode.max_tokens =
        config.get_int("decode.decision.max_tokens", out.decision_decode.max_tokens);
    out.decision_decode.temperature =
        config.get_double("decode.decision.temperature", out.decision_decode.temperature);
    out.geometric_decode.max_tokens =
        config.get_int("decode.geometric.max_tokens", out.geometric_decode.max_tokens);
    out.geometric_decode.temperature =
        config.get_double("decode.geometric.temperature", out.geometric_decode.temperature);
    out.semantic_decode.max_tokens =
        config.get_int("decode.semantic.max_tokens", out.semantic_decode.max_tokens);
    out.semantic_decode.temperature =
        config.get_double("decode.semantic.temperature", out.semantic_decode.temperature);
    out.include_timings = config.get_bool("output.include_timings", out.include_timings);
    out.prompts_dir = config.get_or("prompts.dir", out.prompts_dir);
    out.validate();
    return out;
}

void PipelineConfig::validate() const {
    auto positive = [](bool ok, const char* name) {
        if (!ok) throw ConfigError(std::string("pipeline config: ") + name + " out of range");
    };
    positive(margin_fraction >= 0.0, "margin_fraction");
    positive(crop_margin_px >= 0, "crop_margin_px");
    positive(boundary_band_px >= 1, "boundary_band_px");
    positive(gray_value >= 0 && gray_value <= 255, "gray_value");
    positive(scale_limit >= 1 && scale_limit <= 3, "scale_limit");
    positive(stroke_px >= 1, "stroke_px");
    positive(occluders.adjacency_radius_px >= 1, "adjacency_radius_px");
    positive(occluders.inside_modal_threshold > 0.0 && occluders.inside_modal_threshold <= 1.0,
             "inside_modal_threshold");
    positive(parallelism >= 1, "parallelism");
    positive(description_budget_chars >= 8, "description_budget_chars");
    positive(decision_decode.max_tokens >= 1 && geometric_decode.max_tokens >= 1 &&
                 semantic_decode.max_tokens >= 1,
             "max_tokens");
    positive(decision_decode.temperature >= 0.0 && geometric_decode.temperature >= 0.0 &&
                 semantic_decode.temperature >= 0.0,
             "temperature");
}

namespace {

nlohmann::json box_json(const BBox& b) {
    return nlohmann::json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

// --- per-run call counting ---------------------------------------------

struct AtomicCounts {
    std::atomic<int> chat_small{0};
    std::atomic<int> chat_large{0};
    std::atomic<int> segment_all{0};
    std::atomic<int> segment_region{0};
    std::atomic<int> predict_order{0};
    std::atomic<int> inpaint{0};

    BackendCallCounts snapshot() const {
        return BackendCallCounts{chat_small.load(), chat_large.load(), segment_all.load(),
                                 segment_region.load(), predict_order.load(), inpaint.load()};
    }
};

class CountingChat : public ChatVisionModel {
public:
    CountingChat(std::shared_ptr<ChatVisionModel> inner, std::atomic<int>* counter)
        : inner_(std::move(inner)), counter_(counter) {}
    std::string chat(const ChatVisionRequest& request) override {
        ++*counter_;
        return inner_->chat(request);
    }
    std::string id() const override { return inner_->id(); }

private:
    std::shared_ptr<ChatVisionModel> inner_;
    std::atomic<int>* counter_;
};

class CountingSegmenter : public Segmenter {
public:
    CountingSegmenter(std::shared_ptr<Segmenter> inner, AtomicCounts* counts)
        : inner_(std::move(inner)), counts_(counts) {}
    std::vector<BinaryMask> segment_all(const Image& image) override {
        ++counts_->segment_all;
        return inner_->segment_all(image);
    }
    BinaryMask segment_region(const Image& image, const std::vector<PixelPoint>& seeds) override {
        ++counts_->segment_region;
        return inner_->segment_region(image, seeds);
    }
    BinaryMask segment_region(const Image& image, const BBox& box) override {
        ++counts_->segment_region;
        return inner_->segment_region(image, box);
    }

private:
    std::shared_ptr<Segmenter> inner_;
    AtomicCounts* counts_;
};

class CountingOrder : public OcclusionOrderPredictor {
public:
    CountingOrder(std::shared_ptr<OcclusionOrderPredictor> inner, AtomicCounts* counts)
        : inner_(std::move(inner)), counts_(counts) {}
    OrderMatrix predict_order(const Image& image, const std::vector<BinaryMask>& masks) override {
        ++counts_->predict_order;
        return inner_->predict_order(image, masks);
    }

private:
    std::shared_ptr<OcclusionOrderPredictor> inner_;
    AtomicCounts* counts_;
};

class CountingInpainter : public Inpainter {
public:
    CountingInpainter(std::shared_ptr<Inpainter> inner, AtomicCounts* counts)
        : inner_(std::move(inner)), counts_(counts) {}
    Image inpaint(const Image& image, const BinaryMask& region,
                  const std::string& prompt) override {
        ++counts_->inpaint;
        return inner_->inpaint(image, region, prompt);
    }

private:
    std::shared_ptr<Inpainter> inner_;
    AtomicCounts* counts_;
};

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>* sink) : sink_(sink) {}

    template <typename F>
    auto time(const char* stage, F&& body) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            record(stage, start);
        } else {
            auto result = body();
            record(stage, start);
            return result;
        }
    }

private:
    void record(const char* stage, std::chrono::steady_clock::time_point start) {
        const auto elapsed = std::chrono::steady_clock::now() - start;
        sink_->push_back(StageTiming{
            stage, std::chrono::duration<double, std::milli>(elapsed).count()});
    }

    std::vector<StageTiming>* sink_;
};

}  // namespace

nlohmann::ordered_json RunRecord::to_json(bool include_timings) const {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["sample_id"] = sample_id;
    j["status"] = status;
    j["error"] = error;

    if (decision) {
        j["decision"] = {{"requires_extensive_completion", decision->requires_extensive_completion},
                         {"category", decision->category},
                         {"parse_fallback_used", decision->parse_fallback_used},
                         {"stage_failed", decision_stage_failed},
                         {"raw_response", decision->raw_response}};
    }
    if (boxes) {
        j["boxes"] = {{"tight", box_json(boxes->tight)},
                      {"moderate", box_json(boxes->moderate)},
                      {"coarse", box_json(boxes->coarse)},
                      {"source", to_string(boxes->source)},
                      {"degenerate_repaired", boxes->degenerate_repaired},
                      {"backend_failed", geometric_backend_failed}};
    }
    if (geometric_raw_response) j["geometric_raw_response"] = *geometric_raw_response;
    if (long_description) j["long_description"] = *long_description;
    if (semantic_raw_response) j["semantic_raw_response"] = *semantic_raw_response;
    if (prompt) {
        j["prompt"] = {{"text", prompt->text}, {"kind", to_string(prompt->kind)}};
    }
    if (!prompt_template_ids.empty()) {
        nlohmann::ordered_json ids = nlohmann::ordered_json::object();
        for (const auto& [stage, id] : prompt_template_ids) ids[stage] = id;
        j["prompt_template_ids"] = ids;
    }
    if (result) {
        nlohmann::ordered_json trace = nlohmann::ordered_json::array();
        for (const auto& t : result->trace)
            trace.push_back({{"scale", t.scale},
                             {"inpaint_area", t.inpaint_area},
                             {"touched_boundary", t.touched_boundary},
                             {"ok", t.ok},
                             {"error", t.error}});
        j["result"] = {{"chosen_scale", result->chosen_scale},
                       {"incomplete", result->incomplete},
                       {"trace", trace}};
    }
    if (inpaint_mask.width() > 0) j["inpaint_mask"] = mask_to_rle_json(inpaint_mask);
    j["calls"] = {{"chat_small", calls.chat_small},     {"chat_large", calls.chat_large},
                  {"segment_all", calls.segment_all},   {"segment_region", calls.segment_region},
                  {"predict_order", calls.predict_order}, {"inpaint", calls.inpaint}};
    if (include_timings) {
        nlohmann::ordered_json timing = nlohmann::ordered_json::array();
        for (const auto& t : timings) timing.push_back({{"stage", t.stage}, {"ms", t.ms}});
        j["timings"] = timing;
    }
    if (!config_echo.is_null()) j["config"] = config_echo;
    if (!files.empty()) {
        nlohmann::ordered_json file_map = nlohmann::ordered_json::object();
        for (const auto& [key, value] : files) file_map[key] = value;
        j["files"] = file_map;
    }
    return j;
}

RunRecord run(const PipelineConfig& config, const BackendRegistry& backends,
              const TargetSpec& spec, const PromptSet& prompts) {
    config.validate();
    backends.require_pipeline_roles();

    RunRecord record;
    record.sample_id = spec.sample_id;
    if (!spec.modal.any() || spec.image.size() != spec.modal.size()) {
        record.status = "error";
        record.error = "target spec: modal mask empty or dimensions inconsistent";
        return record;
    }

    AtomicCounts counts;
    CountingChat chat_small(backends.chat_small, &counts.chat_small);
    CountingChat chat_large(backends.chat_large, &counts.chat_large);
    CountingSegmenter segmenter(backends.segmenter, &counts);
    CountingOrder order(backends.order_predictor, &counts);
    CountingInpainter inpainter(backends.inpainter, &counts);
    StageClock clock(&record.timings);

    try {
        // occluder detection
        const OccluderSet occluders = clock.time("occluders", [&] {
            return detect_occluders(spec.image, spec.modal, segmenter, order, config.occluders);
        });
        record.inpaint_mask = occluders.inpaint_mask;

        // guidance decision; a failing decision backend degrades toward guidance
        GuidanceDecision decision = clock.time("decision", [&] {
            record.prompt_template_ids["decision"] = prompt_template_id(prompts.decision_system);
            try {
                return decide(chat_small, spec.image, spec.modal, prompts,
                              config.decision_decode, config.crop_margin_px, config.stroke_px);
            } catch (const BackendError& e) {
                record.decision_stage_failed = true;
                GuidanceDecision fallback;
                fallback.requires_extensive_completion = true;
                fallback.category = "object";
                fallback.parse_fallback_used = true;
                fallback.raw_response = std::string("<decision backend failed: ") + e.what() + ">";
                return fallback;
            }
        });
        if (spec.category_hint && !spec.category_hint->empty())
            decision.category = *spec.category_hint;
        record.decision = decision;

        // geometric guidance (and semantic, only when invoked)
        const BBox modal_bbox = mask_to_bbox(spec.modal);
        MultiScaleBoxes boxes;
        std::optional<std::string> long_description;
        if (decision.requires_extensive_completion) {
            boxes = clock.time("geometric", [&] {
                record.prompt_template_ids["geometric"] =
                    prompt_template_id(prompts.geometric_system);
                std::string raw;
                try {
                    MultiScaleBoxes predicted = predict_boxes(
                        chat_large, spec.image, spec.modal, decision.category, prompts,
                        config.geometric_decode, config.margin_fraction, config.stroke_px, &raw);
                    record.geometric_raw_response = raw;
                    return predicted;
                } catch (const BackendError&) {
                    record.geometric_backend_failed = true;
                    return fallback_bbox(modal_bbox, spec.image.size(), config.margin_fraction);
                }
            });
            long_description = clock.time("semantic", [&]() -> std::optional<std::string> {
                record.prompt_template_ids["semantic"] =
                    prompt_template_id(prompts.semantic_system);
                try {
                    Description description = generate_description(
                        chat_large, spec.image, spec.modal, occluders.inpaint_mask,
                        decision.category, prompts, config.semantic_decode, config.gray(),
                        config.crop_margin_px, config.stroke_px,
                        config.description_budget_chars);
                    record.semantic_raw_response = description.raw_response;
                    return description.text;
                } catch (const BackendError&) {
                    return std::nullopt;  // degrade to the category prompt
                } catch (const MalformedGuidanceError&) {
                    return std::nullopt;
                }
            });
        } else {
            boxes = fallback_bbox(modal_bbox, spec.image.size(), config.margin_fraction);
        }
        record.boxes = boxes;
        record.long_description = long_description;

        PromptSelection prompt = select_prompt(decision, long_description);
        if (prompt.kind == PromptSelection::Kind::Long)
            prompt.raw_response = record.semantic_raw_response;
        record.prompt = prompt;

        // multi-scale completion
        record.result = clock.time("inpaint", [&] {
            return multiscale_complete(segmenter, inpainter, spec.image, spec.modal,
                                       occluders.inpaint_mask, boxes, prompt,
                                       config.inpaint_params());
        });
    } catch (const std::exception& e) {
        record.status = "error";
        record.error = e.what();
    }

    record.calls = counts.snapshot();
    return record;
}

std::vector<RunRecord> run_batch(const PipelineConfig& config, const BackendRegistry& backends,
                                 const std::vector<TargetSpec>& specs,
                                 const PromptSet& prompts) {
    if (specs.empty()) throw InvalidInputError("run_batch: no samples");
    std::vector<RunRecord> records(specs.size());
    std::atomic<std::size_t> next{0};
    const int workers =
        std::max(1, std::min<int>(config.parallelism, static_cast<int>(specs.size())));

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            try {
                records[i] = run(config, backends, specs[i], prompts);
            } catch (const std::exception& e) {
                RunRecord failed;
                failed.sample_id = specs[i].sample_id;
                failed.status = "error";
                failed.error = e.what();
                records[i] = failed;
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return records;
}

}  // namespace amodal

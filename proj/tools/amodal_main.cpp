// amodal: occlusion-aware object completion driven by guided inpainting,
// plus the evaluation and synthetic-data commands around it.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "amodal/backend_factory.hpp"
#include "amodal/config.hpp"
#include "amodal/errors.hpp"
#include "amodal/eval.hpp"
#include "amodal/pipeline.hpp"
#include "amodal/png_io.hpp"
#include "amodal/render.hpp"
#include "amodal/synth.hpp"

namespace fs = std::filesystem;
using namespace amodal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPipelineFailure = 2;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file (ini-style sections)");
        cmd->add_option("--override", overrides, "config override key=value; bare keys hit [pipeline]")
            ->take_all();
    }

    Config load() const {
        Config config = config_path.empty() ? Config() : Config::parse_file(config_path);
        for (const auto& assignment : overrides) config.apply_override(assignment);
        return config;
    }
};

AnnotationFormat parse_format(const std::string& name) {
    if (name == "synth-dir") return AnnotationFormat::SynthDir;
    if (name == "generic-json") return AnnotationFormat::GenericJson;
    throw ConfigError("unknown annotation format: " + name);
}

PromptSet prompts_for(const PipelineConfig& config) {
    return config.prompts_dir.empty() ? PromptSet::defaults()
                                      : PromptSet::load(config.prompts_dir);
}

void require_readable(const fs::path& path, const char* what) {
    if (!fs::exists(path))
        throw InvalidInputError(std::string(what) + " not found: " + path.string());
}

// Writes one run's artifacts next to its record and returns the record JSON path.
fs::path write_run_outputs(RunRecord& record, const TargetSpec& spec, const fs::path& dir,
                           const Config& config, bool include_timings) {
    fs::create_directories(dir);
    write_png(dir / "input.png", spec.image);
    write_png(dir / "modal.png", spec.modal);
    record.files["input_image"] = "input.png";
    record.files["input_modal"] = "modal.png";
    if (record.inpaint_mask.width() > 0) {
        write_png(dir / "inpaint_mask.png", record.inpaint_mask);
        record.files["inpaint_mask"] = "inpaint_mask.png";
    }
    if (record.result) {
        write_png(dir / "amodal.png", record.result->amodal_image);
        write_png(dir / "amodal_mask.png", record.result->amodal_mask);
        record.files["amodal_image"] = "amodal.png";
        record.files["amodal_mask"] = "amodal_mask.png";
    }
    record.config_echo = config.echo();
    const fs::path record_path = dir / "run_record.json";
    std::ofstream out(record_path, std::ios::trunc);
    out << record.to_json(include_timings).dump(2) << "\n";
    return record_path;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::vector<TargetSpec> specs_of(const std::vector<AnnotatedSample>& samples) {
    std::vector<TargetSpec> specs;
    specs.reserve(samples.size());
    for (const auto& sample : samples) specs.push_back(sample.target);
    return specs;
}

nlohmann::json read_record(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open record: " + path.string());
    nlohmann::json record = nlohmann::json::parse(in, nullptr, false);
    if (record.is_discarded())
        throw InvalidInputError("malformed record json: " + path.string());
    return record;
}

// --- subcommands --------------------------------------------------------

int cmd_complete(const CommonArgs& common, const std::string& image_path,
                 const std::string& modal_path, const std::string& category,
                 const std::string& out_dir) {
    require_readable(image_path, "image");
    require_readable(modal_path, "modal mask");
    const Config config = common.load();
    const PipelineConfig pipeline_config = PipelineConfig::from_config(config);

    TargetSpec spec;
    spec.sample_id = fs::path(image_path).stem().string();
    spec.image = read_png_image(image_path);
    spec.modal = read_png_mask(modal_path);
    if (!category.empty()) spec.category_hint = category;

    const BackendRegistry backends = make_backends(config, pipeline_config);
    RunRecord record = run(pipeline_config, backends, spec, prompts_for(pipeline_config));
    write_run_outputs(record, spec, out_dir, config, pipeline_config.include_timings);

    if (record.status != "ok") {
        std::fprintf(stderr, "completion failed: %s\n", record.error.c_str());
        return kExitPipelineFailure;
    }
    std::printf("%s: scale=%s prompt=%s outputs in %s\n", spec.sample_id.c_str(),
                record.result->chosen_scale.c_str(), to_string(record.prompt->kind), out_dir.c_str());
    return kExitOk;
}

int cmd_batch(const CommonArgs& common, const std::string& input, const std::string& format,
              const std::string& out_dir) {
    require_readable(input, "input");
    const Config config = common.load();
    const PipelineConfig pipeline_config = PipelineConfig::from_config(config);
    const LoadResult loaded = load_annotations(input, parse_format(format));
    for (const auto& error : loaded.errors)
        std::fprintf(stderr, "warning: skipped %s\n", error.c_str());
    if (loaded.samples.empty()) {
        std::fprintf(stderr, "no loadable samples in %s\n", input.c_str());
        return kExitUsage;
    }

    const BackendRegistry backends = make_backends(config, pipeline_config);
    const std::vector<TargetSpec> specs = specs_of(loaded.samples);
    std::vector<RunRecord> records =
        run_batch(pipeline_config, backends, specs, prompts_for(pipeline_config));

    fs::create_directories(out_dir);
    std::size_t ok = 0;
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        write_run_outputs(records[i], specs[i], fs::path(out_dir) / records[i].sample_id, config,
                          pipeline_config.include_timings);
        ids.push_back(records[i].sample_id);
        if (records[i].status == "ok")
            ++ok;
        else
            std::fprintf(stderr, "sample %s failed: %s\n", records[i].sample_id.c_str(),
                         records[i].error.c_str());
    }
    const nlohmann::ordered_json summary{{"total", records.size()},
                                         {"ok", ok},
                                         {"failed", records.size() - ok},
                                         {"loader_errors", loaded.errors.size()},
                                         {"containment_repaired", loaded.repaired},
                                         {"sample_ids", ids}};
    write_text(fs::path(out_dir) / "batch_summary.json", summary.dump(2) + "\n");
    std::printf("batch: %zu/%zu ok, outputs in %s\n", ok, records.size(), out_dir.c_str());
    return ok > 0 ? kExitOk : kExitPipelineFailure;
}

int cmd_synth(const std::string& out_dir, int n, std::uint64_t seed, const std::string& shape,
              int occluder_count, double min_ratio, double max_ratio, int canvas,
              bool ratios_given) {
    if (n < 1) throw InvalidInputError("synth: --n must be >= 1");
    fs::create_directories(out_dir);
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (int i = 0; i < n; ++i) {
        SceneSpec spec;
        const std::uint64_t sample_seed = seed + static_cast<std::uint64_t>(i);
        if (shape == "rect")
            spec.shape = ShapeKind::Rect;
        else if (shape == "ellipse")
            spec.shape = ShapeKind::Ellipse;
        else if (shape == "sprite")
            spec.shape = ShapeKind::Sprite;
        else  // mix
            spec.shape = static_cast<ShapeKind>(sample_seed % 3);
        spec.occluder_count = occluder_count >= 0 ? occluder_count : 1 + (i % 3);
        spec.min_occlusion = min_ratio;
        spec.max_occlusion = max_ratio;
        if (spec.occluder_count == 0 && !ratios_given) {
            spec.min_occlusion = 0.0;
            spec.max_occlusion = 0.0;
        }
        spec.canvas = ImageSize{canvas, canvas};
        const SyntheticSample sample = gen_scene(spec, sample_seed);
        save_sample(sample, fs::path(out_dir) / sample.sample_id);
        ids.push_back(sample.sample_id);
    }
    const nlohmann::ordered_json index{{"count", n}, {"seed", seed}, {"sample_ids", ids}};
    write_text(fs::path(out_dir) / "index.json", index.dump(2) + "\n");
    std::printf("synth: wrote %d samples to %s\n", n, out_dir.c_str());
    return kExitOk;
}

int cmd_eval_seg(const CommonArgs&, const std::string& annotations, const std::string& format,
                 const std::string& pred_dir, const std::string& out_dir) {
    require_readable(annotations, "annotations");
    const LoadResult loaded = load_annotations(annotations, parse_format(format));
    std::vector<std::pair<AnnotatedSample, BinaryMask>> results;
    std::size_t missing = 0;
    for (const auto& sample : loaded.samples) {
        const fs::path mask_path =
            fs::path(pred_dir) / sample.target.sample_id / "amodal_mask.png";
        if (!fs::exists(mask_path)) {
            std::fprintf(stderr, "warning: no prediction for %s\n",
                         sample.target.sample_id.c_str());
            ++missing;
            continue;
        }
        results.emplace_back(sample, read_png_mask(mask_path));
    }
    if (results.empty()) {
        std::fprintf(stderr, "nothing to evaluate\n");
        return kExitUsage;
    }
    const SegReport report = eval_amodal_seg(results);
    std::printf("%s", report.to_table().c_str());
    if (missing) std::printf("(missing predictions: %zu)\n", missing);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "seg_report.json", report.to_json().dump(2) + "\n");
        write_text(fs::path(out_dir) / "seg_report.txt", report.to_table());
    }
    return kExitOk;
}

int cmd_eval_oor(const CommonArgs& common, const std::string& annotations,
                 const std::string& format, const std::string& pred_dir,
                 const std::string& labels_path, const std::string& out_dir) {
    require_readable(annotations, "annotations");
    require_readable(labels_path, "labels file");
    const Config config = common.load();
    const PipelineConfig pipeline_config = PipelineConfig::from_config(config);
    const BackendRegistry backends = make_backends(config, pipeline_config);
    if (!backends.classifier)
        throw ConfigError("eval-oor needs a classifier backend ([backends.classifier])");

    std::vector<std::string> labels;
    std::ifstream labels_in(labels_path);
    for (std::string line; std::getline(labels_in, line);)
        if (!line.empty()) labels.push_back(line);

    const LoadResult loaded = load_annotations(annotations, parse_format(format));
    std::vector<OorInput> inputs;
    for (const auto& sample : loaded.samples) {
        const fs::path dir = fs::path(pred_dir) / sample.target.sample_id;
        if (!fs::exists(dir / "amodal.png") || !fs::exists(dir / "amodal_mask.png")) {
            std::fprintf(stderr, "warning: no completion for %s\n",
                         sample.target.sample_id.c_str());
            continue;
        }
        inputs.push_back(OorInput{sample, read_png_image(dir / "amodal.png"),
                                  read_png_mask(dir / "amodal_mask.png")});
    }
    if (inputs.empty()) {
        std::fprintf(stderr, "nothing to evaluate\n");
        return kExitUsage;
    }
    const OorReport report = eval_oor(inputs, *backends.classifier, labels);
    std::printf("%s", report.to_table().c_str());
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "oor_report.json", report.to_json().dump(2) + "\n");
        write_text(fs::path(out_dir) / "oor_report.txt", report.to_table());
    }
    return kExitOk;
}

int cmd_eval_gdm(const std::string& fixture, const std::string& annotations,
                 const std::string& format, const std::string& records_dir,
                 const std::string& out_dir) {
    std::vector<std::pair<double, bool>> pairs;
    if (!fixture.empty()) {
        std::ifstream in(fixture);
        if (!in) throw InvalidInputError("cannot open fixture: " + fixture);
        const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.is_array())
            throw InvalidInputError("fixture must be a JSON array");
        for (const auto& entry : j)
            pairs.emplace_back(entry.at("occlusion_ratio").get<double>(),
                               entry.at("requires").get<bool>());
    } else {
        if (annotations.empty() || records_dir.empty())
            throw InvalidInputError("eval-gdm needs --fixture or --annotations + --records");
        const LoadResult loaded = load_annotations(annotations, parse_format(format));
        for (const auto& sample : loaded.samples) {
            const fs::path record_path =
                fs::path(records_dir) / sample.target.sample_id / "run_record.json";
            if (!fs::exists(record_path)) {
                std::fprintf(stderr, "warning: no record for %s\n",
                             sample.target.sample_id.c_str());
                continue;
            }
            const nlohmann::json record = read_record(record_path);
            if (!record.contains("decision")) continue;
            pairs.emplace_back(
                sample_occlusion_ratio(sample),
                record["decision"]["requires_extensive_completion"].get<bool>());
        }
    }
    if (pairs.empty()) {
        std::fprintf(stderr, "nothing to evaluate\n");
        return kExitUsage;
    }
    const GdmReport report = eval_gdm(pairs);
    std::printf("%s", report.to_table().c_str());
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "gdm_report.json", report.to_json().dump(2) + "\n");
        write_text(fs::path(out_dir) / "gdm_report.txt", report.to_table());
    }
    return kExitOk;
}

int cmd_eval_mask(const std::string& annotations, const std::string& format,
                  const std::string& pred_dir, const std::string& out_dir) {
    require_readable(annotations, "annotations");
    const LoadResult loaded = load_annotations(annotations, parse_format(format));
    std::vector<std::pair<BinaryMask, BinaryMask>> pairs;
    for (const auto& sample : loaded.samples) {
        const fs::path record_path =
            fs::path(pred_dir) / sample.target.sample_id / "run_record.json";
        if (!fs::exists(record_path)) {
            std::fprintf(stderr, "warning: no record for %s\n", sample.target.sample_id.c_str());
            continue;
        }
        const nlohmann::json record = read_record(record_path);
        if (!record.contains("boxes") || !record.contains("inpaint_mask") ||
            !record.contains("result"))
            continue;
        const std::string scale = record["result"]["chosen_scale"].get<std::string>();
        const std::string key = scale == "fallback" ? "tight" : scale;
        const auto& b = record["boxes"][key];
        const BBox chosen{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
        const BinaryMask inpaint = mask_from_rle_json(record["inpaint_mask"]);
        if (!sample.gt_amodal_mask.any() || inpaint.size() != sample.gt_amodal_mask.size())
            continue;
        pairs.push_back(mask_accuracy_pair(inpaint, chosen, sample.gt_amodal_mask));
    }
    if (pairs.empty()) {
        std::fprintf(stderr, "nothing to evaluate\n");
        return kExitUsage;
    }
    const double miou = eval_mask_accuracy(pairs);
    std::printf("inpainting-mask accuracy: %.2f%% over %zu samples\n", miou, pairs.size());
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        const nlohmann::ordered_json j{{"kind", "inpainting_mask_accuracy"},
                                       {"miou_percent", miou},
                                       {"count", pairs.size()}};
        write_text(fs::path(out_dir) / "mask_report.json", j.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_render(const std::vector<std::string>& record_paths, const std::string& out_dir) {
    if (record_paths.empty()) throw InvalidInputError("render: no records given");
    fs::create_directories(out_dir);
    for (const auto& record_path : record_paths) {
        const nlohmann::json record = read_record(record_path);
        const fs::path base = fs::path(record_path).parent_path();
        const auto files = record.value("files", nlohmann::json::object());

        auto load_image = [&](const char* key) -> std::optional<Image> {
            if (!files.contains(key)) return std::nullopt;
            const fs::path path = base / files[key].get<std::string>();
            if (!fs::exists(path)) return std::nullopt;
            try {
                return read_png_image(path);
            } catch (const std::exception&) {
                return std::nullopt;
            }
        };
        auto load_mask = [&](const char* key) -> std::optional<BinaryMask> {
            if (!files.contains(key)) return std::nullopt;
            const fs::path path = base / files[key].get<std::string>();
            if (!fs::exists(path)) return std::nullopt;
            try {
                return read_png_mask(path);
            } catch (const std::exception&) {
                return std::nullopt;
            }
        };

        const std::optional<Image> input = load_image("input_image");
        const std::optional<BinaryMask> modal = load_mask("input_modal");
        const std::optional<BinaryMask> inpaint = load_mask("inpaint_mask");
        const std::optional<Image> completion = load_image("amodal_image");

        std::optional<Image> masked;
        if (input && inpaint && input->size() == inpaint->size()) {
            Image m = fill_region(*input, *inpaint, kGray);
            if (modal && modal->any()) draw_box_outline(m, mask_to_bbox(*modal), kRed, 2);
            masked = std::move(m);
        }

        const Image panel = render_panel({PanelCell{"input", input},
                                          PanelCell{"masked occluders", masked},
                                          PanelCell{"completion", completion}});
        const std::string id = record.value("sample_id", fs::path(record_path).stem().string());
        write_png(fs::path(out_dir) / (id + "_panel.png"), panel);
        std::printf("rendered %s\n", (fs::path(out_dir) / (id + "_panel.png")).c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"occlusion-aware object completion via guided inpainting"};
    app.require_subcommand(1);

    std::function<int()> action;

    // complete
    {
        auto* cmd = app.add_subcommand("complete", "complete one occluded object");
        auto common = std::make_shared<CommonArgs>();
        auto image = std::make_shared<std::string>();
        auto modal = std::make_shared<std::string>();
        auto category = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("out");
        cmd->add_option("--image", *image, "input image png")->required();
        cmd->add_option("--modal", *modal, "modal (visible) mask png")->required();
        cmd->add_option("--category", *category, "known category, overrides the decision model");
        cmd->add_option("--out", *out, "output directory");
        common->attach(cmd);
        cmd->callback([=, &action] {
            action = [=] { return cmd_complete(*common, *image, *modal, *category, *out); };
        });
    }
    // batch
    {
        auto* cmd = app.add_subcommand("batch", "complete every sample in an annotation set");
        auto common = std::make_shared<CommonArgs>();
        auto input = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("synth-dir");
        auto out = std::make_shared<std::string>("out");
        cmd->add_option("--input", *input, "annotations (json file or synth dir)")->required();
        cmd->add_option("--format", *format, "generic-json | synth-dir");
        cmd->add_option("--out", *out, "output directory");
        common->attach(cmd);
        cmd->callback([=, &action] {
            action = [=] { return cmd_batch(*common, *input, *format, *out); };
        });
    }
    // synth
    {
        auto* cmd = app.add_subcommand("synth", "generate a synthetic occlusion suite");
        auto out = std::make_shared<std::string>();
        auto n = std::make_shared<int>(10);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto shape = std::make_shared<std::string>("mix");
        auto occluders = std::make_shared<int>(-1);
        auto min_ratio = std::make_shared<double>(0.3);
        auto max_ratio = std::make_shared<double>(0.8);
        auto canvas = std::make_shared<int>(192);
        cmd->add_option("--out", *out, "output directory")->required();
        cmd->add_option("--n", *n, "number of samples");
        cmd->add_option("--seed", *seed, "base seed");
        cmd->add_option("--shape", *shape, "rect | ellipse | sprite | mix");
        cmd->add_option("--occluders", *occluders, "occluders per scene (default varies 1-3)");
        auto* min_opt = cmd->add_option("--min-ratio", *min_ratio, "min occlusion ratio");
        auto* max_opt = cmd->add_option("--max-ratio", *max_ratio, "max occlusion ratio");
        cmd->add_option("--canvas", *canvas, "canvas size in pixels");
        cmd->callback([=, &action] {
            const bool ratios_given = min_opt->count() > 0 || max_opt->count() > 0;
            action = [=] {
                return cmd_synth(*out, *n, *seed, *shape, *occluders, *min_ratio, *max_ratio,
                                 *canvas, ratios_given);
            };
        });
    }
    // eval-seg
    {
        auto* cmd = app.add_subcommand("eval-seg", "stratified amodal-segmentation mIoU");
        auto common = std::make_shared<CommonArgs>();
        auto annotations = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("synth-dir");
        auto pred = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("--annotations", *annotations, "annotation set")->required();
        cmd->add_option("--format", *format, "generic-json | synth-dir");
        cmd->add_option("--pred", *pred, "batch output directory")->required();
        cmd->add_option("--out", *out, "report directory");
        common->attach(cmd);
        cmd->callback([=, &action] {
            action = [=] { return cmd_eval_seg(*common, *annotations, *format, *pred, *out); };
        });
    }
    // eval-oor
    {
        auto* cmd = app.add_subcommand("eval-oor", "occluded object recognition accuracy");
        auto common = std::make_shared<CommonArgs>();
        auto annotations = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("synth-dir");
        auto pred = std::make_shared<std::string>();
        auto labels = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("--annotations", *annotations, "annotation set")->required();
        cmd->add_option("--format", *format, "generic-json | synth-dir");
        cmd->add_option("--pred", *pred, "batch output directory")->required();
        cmd->add_option("--labels", *labels, "label list, one per line")->required();
        cmd->add_option("--out", *out, "report directory");
        common->attach(cmd);
        cmd->callback([=, &action] {
            action = [=] {
                return cmd_eval_oor(*common, *annotations, *format, *pred, *labels, *out);
            };
        });
    }
    // eval-gdm
    {
        auto* cmd = app.add_subcommand("eval-gdm", "guidance call/skip rates");
        auto fixture = std::make_shared<std::string>();
        auto annotations = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("synth-dir");
        auto records = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("--fixture", *fixture,
                        "JSON array of {occlusion_ratio, requires} pairs");
        cmd->add_option("--annotations", *annotations, "annotation set (with --records)");
        cmd->add_option("--format", *format, "generic-json | synth-dir");
        cmd->add_option("--records", *records, "batch output directory (with --annotations)");
        cmd->add_option("--out", *out, "report directory");
        cmd->callback([=, &action] {
            action = [=] { return cmd_eval_gdm(*fixture, *annotations, *format, *records, *out); };
        });
    }
    // eval-mask
    {
        auto* cmd = app.add_subcommand("eval-mask", "inpainting-mask accuracy vs GT boxes");
        auto annotations = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("synth-dir");
        auto pred = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("--annotations", *annotations, "annotation set")->required();
        cmd->add_option("--format", *format, "generic-json | synth-dir");
        cmd->add_option("--pred", *pred, "batch output directory")->required();
        cmd->add_option("--out", *out, "report directory");
        cmd->callback([=, &action] {
            action = [=] { return cmd_eval_mask(*annotations, *format, *pred, *out); };
        });
    }
    // render
    {
        auto* cmd = app.add_subcommand("render", "render result panels from run records");
        auto records = std::make_shared<std::vector<std::string>>();
        auto out = std::make_shared<std::string>("panels");
        cmd->add_option("--records", *records, "run_record.json files")->required()->take_all();
        cmd->add_option("--out", *out, "panel output directory");
        cmd->callback([=, &action] {
            action = [=] { return cmd_render(*records, *out); };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        return action ? action() : kExitUsage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const InvalidInputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitUsage;
    } catch (const CompletionFailedError& e) {
        std::fprintf(stderr, "pipeline error: %s\n", e.what());
        return kExitPipelineFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPipelineFailure;
    }
}

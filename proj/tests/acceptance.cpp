#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Acceptance suite: every criterion below prints exactly one
//   [criterion NN] <name>: PASS|FAIL
// line, so the gate is readable straight off the test log.

#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "amodal/cache.hpp"
#include "amodal/decision.hpp"
#include "amodal/errors.hpp"
#include "amodal/eval.hpp"
#include "amodal/geometric.hpp"
#include "amodal/http_backend.hpp"
#include "amodal/json_util.hpp"
#include "amodal/pipeline.hpp"
#include "amodal/png_io.hpp"
#include "amodal/synth.hpp"
#include "scene_support.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace amodal;
using testsupport::rect_mask;
using testsupport::Rng;

namespace {

void criterion_line(int number, const char* name, bool ok) {
    std::printf("[criterion %02d] %s: %s\n", number, name, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
    CHECK_MESSAGE(ok, "criterion ", number, " (", name, ")");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

TargetSpec spec_of(const SyntheticSample& sample) {
    TargetSpec spec;
    spec.sample_id = sample.sample_id;
    spec.image = sample.image;
    spec.modal = sample.modal;
    return spec;
}

// Rectangular object with its right side hidden by one occluder; the hidden
// extent runs past the modal bbox, so a clipped tight box must trigger the
// boundary-touch escalation.
SyntheticSample right_occluded_scene(int x0, int y0, int w, int h, int canvas = 100) {
    SyntheticSample s;
    s.sample_id = "scripted_" + std::to_string(x0) + "_" + std::to_string(y0);
    s.category = "rectangle";
    const BBox object{x0, y0, x0 + w, y0 + h};
    const BBox occluder{x0 + (w * 3) / 5, y0 - 4, x0 + w + 8, y0 + h + 4};
    s.gt_amodal_mask = rect_mask(canvas, canvas, object);
    s.occluder_masks = {rect_mask(canvas, canvas, occluder)};
    s.modal = mask_subtract(s.gt_amodal_mask, s.occluder_masks[0]);
    s.gt_amodal_image = Image(canvas, canvas, RGB{235, 240, 235});
    for (int y = object.y_min; y < object.y_max; ++y)
        for (int x = object.x_min; x < object.x_max; ++x)
            s.gt_amodal_image.set(y, x, RGB{200, 60, 60});
    s.image = s.gt_amodal_image;
    for (int y = 0; y < canvas; ++y)
        for (int x = 0; x < canvas; ++x)
            if (s.occluder_masks[0].at(y, x)) s.image.set(y, x, RGB{70, 90, 200});
    s.occlusion_ratio = occlusion_ratio(s.modal, s.gt_amodal_mask);
    return s;
}

bool directories_byte_identical(const fs::path& a, const fs::path& b) {
    std::vector<fs::path> rel_a;
    for (const auto& entry : fs::recursive_directory_iterator(a))
        if (entry.is_regular_file()) rel_a.push_back(fs::relative(entry.path(), a));
    std::vector<fs::path> rel_b;
    for (const auto& entry : fs::recursive_directory_iterator(b))
        if (entry.is_regular_file()) rel_b.push_back(fs::relative(entry.path(), b));
    std::sort(rel_a.begin(), rel_a.end());
    std::sort(rel_b.begin(), rel_b.end());
    if (rel_a != rel_b) return false;
    for (const auto& rel : rel_a) {
        std::ifstream fa(a / rel, std::ios::binary);
        std::ifstream fb(b / rel, std::ios::binary);
        const std::string da((std::istreambuf_iterator<char>(fa)),
                             std::istreambuf_iterator<char>());
        const std::string db((std::istreambuf_iterator<char>(fb)),
                             std::istreambuf_iterator<char>());
        if (da != db) return false;
    }
    return true;
}

int run_cli(const std::string& args) {
    const std::string command = std::string(AMODAL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("criterion 1: mask-algebra ops equal brute-force pixel loops") {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(101);
    bool ok = true;
    for (int i = 0; i < 1000; ++i) {
        const int h = rng.range(1, 32);
        const int w = rng.range(1, 32);
        const BinaryMask a = testsupport::random_mask(rng, h, w, rng.unit());
        const BinaryMask b = testsupport::random_mask(rng, h, w, rng.unit());
        const BBox box = testsupport::random_bbox(rng, w, h);
        const int band = rng.range(1, 4);

        ok &= intersect_bbox_mask(box, a) == testsupport::bf_intersect_bbox_mask(box, a);
        ok &= mask_union(a, b) == testsupport::bf_union(a, b);
        ok &= mask_intersect(a, b) == testsupport::bf_intersect(a, b);
        ok &= mask_invert(a) == testsupport::bf_invert(a);
        ok &= iou(a, b) == testsupport::bf_iou(a, b);
        ok &= touches_boundary(a, box, band) == testsupport::bf_touches_boundary(a, box, band);
        if (a.any()) ok &= mask_to_bbox(a) == testsupport::bf_mask_to_bbox(a);
        if (!ok) break;
    }
    const double elapsed = seconds_since(start);
    ok &= elapsed < 10.0;
    criterion_line(1, "mask-algebra oracle equivalence (1000 cases, <10s)", ok);
}

TEST_CASE("criterion 2: inpaint-mask resizing is shrink-only") {
    Rng rng(102);
    bool ok = true;
    for (int i = 0; i < 1000; ++i) {
        const int h = rng.range(1, 32);
        const int w = rng.range(1, 32);
        const BinaryMask inpaint = testsupport::random_mask(rng, h, w, rng.unit());
        const BBox box = testsupport::random_bbox(rng, w, h);
        const BinaryMask resized = resize_inpaint_mask(box, inpaint);
        ok &= mask_subset(resized, inpaint);
        ok &= resized == testsupport::bf_intersect_bbox_mask(box, inpaint);
        if (!ok) break;
    }
    criterion_line(2, "resize_inpaint_mask shrink-only (1000 cases)", ok);
}

TEST_CASE("criterion 3: master end-to-end property on 50 oracle scenes") {
    const auto start = std::chrono::steady_clock::now();
    double iou_sum = 0.0;
    int count = 0;
    bool all_ok = true;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SceneSpec scene_spec;
        scene_spec.shape = static_cast<ShapeKind>(seed % 3);
        scene_spec.occluder_count = 1 + static_cast<int>(seed % 3);
        scene_spec.min_occlusion = 0.3;
        scene_spec.max_occlusion = 0.8;
        const SyntheticSample sample = gen_scene(scene_spec, seed);

        BackendRegistry backends = oracle_backends(sample);
        auto chat = std::make_shared<ScriptedChatModel>(oracle_chat_script(sample));
        backends.chat_small = chat;
        backends.chat_large = chat;

        const RunRecord record = run(PipelineConfig{}, backends, spec_of(sample));
        if (record.status != "ok" || !record.result) {
            all_ok = false;
            std::fprintf(stderr, "seed %llu failed: %s\n",
                         static_cast<unsigned long long>(seed), record.error.c_str());
            continue;
        }
        iou_sum += iou(record.result->amodal_mask, sample.gt_amodal_mask);
        ++count;
    }
    const double mean_iou = count ? iou_sum / count : 0.0;
    const double elapsed = seconds_since(start);
    const bool ok = all_ok && count == 50 && mean_iou >= 0.99 && elapsed < 60.0;
    std::printf("  (mean IoU %.4f over %d scenes in %.1fs)\n", mean_iou, count, elapsed);
    criterion_line(3, "oracle-backed pipeline mean IoU >= 0.99 (<60s)", ok);
}

TEST_CASE("criterion 4: multi-scale expansion selects moderate when tight clips") {
    Rng rng(104);
    bool ok = true;
    for (int i = 0; i < 20; ++i) {
        const int x0 = rng.range(12, 22);
        const int y0 = rng.range(14, 24);
        const int w = rng.range(34, 44);
        const int h = rng.range(26, 36);
        const SyntheticSample sample = right_occluded_scene(x0, y0, w, h);

        const BBox gt = mask_to_bbox(sample.gt_amodal_mask);
        const BBox modal_bbox = mask_to_bbox(sample.modal);
        // tight cuts midway through the hidden strip; moderate clears it by 4px
        const int clip_x = (modal_bbox.x_max + gt.x_max) / 2;
        const BBox tight{gt.x_min - 3, gt.y_min - 3, clip_x, gt.y_max + 3};
        const BBox moderate{gt.x_min - 4, gt.y_min - 4, gt.x_max + 4, gt.y_max + 4};
        const BBox coarse{gt.x_min - 10, gt.y_min - 10, gt.x_max + 10, gt.y_max + 10};

        BackendRegistry backends = oracle_backends(sample);
        backends.chat_small = std::make_shared<ScriptedChatModel>(std::vector<ScriptEntry>{
            {"JSON object",
             R"({"requires_extensive_completion":"yes","category":"rectangle"})"}});
        backends.chat_large = std::make_shared<ScriptedChatModel>(std::vector<ScriptEntry>{
            {"Bounding box coordinates", format_boxes({tight, moderate, coarse})},
            {"hidden parts", "Prompt: a red rectangle"}});

        const RunRecord record = run(PipelineConfig{}, backends, spec_of(sample));
        const bool sample_ok = record.status == "ok" && record.result &&
                               record.result->chosen_scale == "moderate" &&
                               record.calls.inpaint == 2 &&
                               iou(record.result->amodal_mask, sample.gt_amodal_mask) == 1.0;
        if (!sample_ok) {
            std::fprintf(stderr, "scripted scene %d: scale=%s inpaints=%d\n", i,
                         record.result ? record.result->chosen_scale.c_str() : "<none>",
                         record.calls.inpaint);
            ok = false;
        }
    }
    criterion_line(4, "tight clips -> chosen_scale=moderate, 2 inpainter calls", ok);
}

TEST_CASE("criterion 5: scripted 'no' skips the large model and uses the 10% margin") {
    Rng rng(105);
    bool ok = true;
    for (int i = 0; i < 10; ++i) {
        SceneSpec scene_spec;
        scene_spec.occluder_count = 1;
        scene_spec.min_occlusion = 0.1;
        scene_spec.max_occlusion = 0.4;
        const SyntheticSample sample = gen_scene(scene_spec, 500 + i);

        BackendRegistry backends = oracle_backends(sample);
        backends.chat_small = std::make_shared<ScriptedChatModel>(std::vector<ScriptEntry>{
            {"", R"({"requires_extensive_completion":"no","category":"box"})"}});
        auto large = std::make_shared<ScriptedChatModel>(
            std::vector<ScriptEntry>{{"", "never used"}});
        backends.chat_large = large;

        const RunRecord record = run(PipelineConfig{}, backends, spec_of(sample));
        const BBox expected =
            expand_bbox(mask_to_bbox(sample.modal), 0.10, sample.image.size());
        ok &= record.status == "ok";
        ok &= record.calls.chat_large == 0 && large->calls() == 0;
        ok &= record.boxes && record.boxes->source == BoxSource::Fallback;
        ok &= record.boxes && record.boxes->tight == expected &&
              record.boxes->moderate == expected && record.boxes->coarse == expected;
        ok &= record.prompt && record.prompt->kind == PromptSelection::Kind::Category;
    }
    criterion_line(5, "selective invocation: zero chat_large calls, exact 10% fallback", ok);
}

TEST_CASE("criterion 6: GCR/GSR match hand-computed percentages exactly") {
    // 20 high-occlusion samples, 15 called -> GCR 75.0
    // 20 low-occlusion samples, 12 skipped -> GSR 60.0
    std::vector<std::pair<double, bool>> fixture;
    for (int i = 0; i < 20; ++i) fixture.emplace_back(0.51 + 0.02 * (i % 10), i < 15);
    for (int i = 0; i < 20; ++i) fixture.emplace_back(0.002 + 0.004 * (i % 10), i >= 12);
    const GdmReport report = eval_gdm(fixture);

    bool ok = report.high_count == 20 && report.low_count == 20;
    ok &= report.gcr_percent && *report.gcr_percent == 75.0;
    ok &= report.gsr_percent && *report.gsr_percent == 60.0;

    // a population with no low-occlusion samples reports no GSR at all
    const GdmReport no_low = eval_gdm({{0.6, true}, {0.7, true}, {0.3, false}});
    ok &= no_low.gcr_percent.has_value() && !no_low.gsr_percent.has_value();
    ok &= no_low.to_json().contains("gcr_percent") && !no_low.to_json().contains("gsr_percent");
    criterion_line(6, "eval_gdm exact percentages; GSR absent without low-occlusion", ok);
}

TEST_CASE("criterion 7: stratified mIoU matches brute force; boundaries are Moderate") {
    Rng rng(107);
    bool ok = true;

    std::vector<std::pair<AnnotatedSample, BinaryMask>> results;
    double sums[3] = {0, 0, 0};
    std::size_t counts[3] = {0, 0, 0};
    auto add_sample = [&](double ratio) {
        const int h = rng.range(4, 24);
        const int w = rng.range(4, 24);
        BinaryMask gt = testsupport::random_mask(rng, h, w, 0.5);
        if (!gt.any()) gt.set(0, 0, true);
        const BinaryMask pred = testsupport::random_mask(rng, h, w, 0.5);
        AnnotatedSample sample;
        sample.target.sample_id = "r";
        sample.target.image = Image(h, w);
        sample.target.modal = gt;
        sample.gt_amodal_mask = gt;
        sample.dataset_occlusion_ratio = ratio;
        results.emplace_back(sample, pred);
        const int idx = ratio > 0.5 ? 2 : (ratio < 0.2 ? 0 : 1);
        sums[idx] += testsupport::bf_iou(pred, gt);
        ++counts[idx];
    };
    for (int i = 0; i < 300; ++i) add_sample(rng.unit());
    const SegReport report = eval_amodal_seg(results);

    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
    ok &= report.hard.count == counts[2] && report.moderate.count == counts[1] &&
          report.easy.count == counts[0];
    if (counts[2]) ok &= close(report.hard.miou_percent, 100.0 * sums[2] / counts[2]);
    if (counts[1]) ok &= close(report.moderate.miou_percent, 100.0 * sums[1] / counts[1]);
    if (counts[0]) ok &= close(report.easy.miou_percent, 100.0 * sums[0] / counts[0]);
    ok &= close(report.overall_percent,
                100.0 * (sums[0] + sums[1] + sums[2]) / results.size());

    // the 0.2 and 0.5 boundaries land in Moderate
    std::vector<std::pair<AnnotatedSample, BinaryMask>> boundary;
    const std::size_t before = results.size();
    add_sample(0.5);
    add_sample(0.2);
    boundary.assign(results.begin() + before, results.end());
    const SegReport boundary_report = eval_amodal_seg(boundary);
    ok &= boundary_report.moderate.count == 2 && boundary_report.hard.count == 0 &&
          boundary_report.easy.count == 0;
    criterion_line(7, "stratified mIoU brute-force match (1e-9); boundary strata", ok);
}

TEST_CASE("criterion 8: guidance parsers survive a 500-case fuzz corpus") {
    Rng rng(108);
    const std::array<std::string, 6> decision_bases = {
        R"({"requires_extensive_completion":"yes","category":"Bear"})",
        R"({"requires_extensive_completion":"no","category":"cup"})",
        "```json\n{\"requires_extensive_completion\": \"yes\", \"category\": \"Dog\"}\n```",
        "The answer is {\"requires_extensive_completion\":\"no\"} thanks",
        R"({"requires_extensive_completion": true, "category": 7})",
        "I think maybe",
    };
    const std::array<std::string, 5> box_bases = {
        "[10, 20, 110, 220]\n[5, 10, 120, 240]\n[0, 0, 140, 260]",
        "tight: [1,1,5,5] moderate: [0,0,6,6] coarse: [0,0,8,8]",
        "sure! boxes: [3,4,5,6], [2,3,7,8] and [0,1,9,9].",
        "sorry, I cannot",
        "[[[[",
    };

    auto mutate = [&](std::string s) {
        switch (rng.range(0, 4)) {
            case 0:  // truncate
                if (!s.empty()) s = s.substr(0, rng.range(0, static_cast<int>(s.size())));
                break;
            case 1: {  // inject random bytes
                std::string noise;
                for (int i = 0; i < rng.range(1, 6); ++i)
                    noise += static_cast<char>(rng.range(1, 255));
                s.insert(rng.range(0, static_cast<int>(s.size())), noise);
                break;
            }
            case 2:  // wrap in fences and prose
                s = "Certainly!\n```\n" + s + "\n``` hope it helps";
                break;
            case 3:  // strip quotes
                std::erase(s, '"');
                break;
            default:  // duplicate
                s += s;
                break;
        }
        return s;
    };

    bool ok = true;
    for (int i = 0; i < 500; ++i) {
        const std::string text = mutate(decision_bases[rng.range(0, 5)]);
        try {
            const GuidanceDecision decision = parse_decision_json(text);
            ok &= !decision.category.empty();
            // with no parseable JSON object the fallback must lean toward guidance
            if (!extract_first_json_object(text))
                ok &= decision.requires_extensive_completion;
        } catch (...) {
            ok = false;
        }
        if (!ok) {
            std::fprintf(stderr, "decision fuzz case %d failed\n", i);
            break;
        }
    }
    for (int i = 0; ok && i < 500; ++i) {
        const std::string text = mutate(box_bases[rng.range(0, 4)]);
        try {
            const auto boxes = parse_boxes(text);
            ok &= boxes.size() == 3;
        } catch (const MalformedGuidanceError&) {
            // the one allowed failure mode
        } catch (...) {
            ok = false;
        }
        if (!ok) std::fprintf(stderr, "box fuzz case %d failed\n", i);
    }
    criterion_line(8, "parse_decision_json / parse_boxes fuzz (500 cases, no crash)", ok);
}

TEST_CASE("criterion 9: cmd_synth and oracle cmd_batch are byte-deterministic") {
    const fs::path root = fs::temp_directory_path() / "amodal_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);

    bool ok = true;
    ok &= run_cli("synth --out " + (root / "s1").string() + " --n 6 --seed 42 --shape mix") == 0;
    ok &= run_cli("synth --out " + (root / "s2").string() + " --n 6 --seed 42 --shape mix") == 0;
    ok &= directories_byte_identical(root / "s1", root / "s2");

    std::ofstream(root / "oracle.ini") << "[backends]\nkind = oracle\noracle_samples = "
                                       << (root / "s1").string() << "\n";
    const std::string batch_args = "batch --input " + (root / "s1").string() +
                                   " --format synth-dir --config " +
                                   (root / "oracle.ini").string() + " --out ";
    ok &= run_cli(batch_args + (root / "b1").string()) == 0;
    ok &= run_cli(batch_args + (root / "b2").string()) == 0;
    ok &= directories_byte_identical(root / "b1", root / "b2");

    fs::remove_all(root);
    criterion_line(9, "byte-identical synth and oracle batch reruns", ok);
}

TEST_CASE("criterion 10: a persistent cache removes all chat network calls on rerun") {
    // stub chat server that answers the three guidance prompts generically
    httplib::Server server;
    std::atomic<int> network_calls{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                            httplib::Response& res) {
        ++network_calls;
        const auto body = nlohmann::json::parse(req.body);
        std::string user;
        for (const auto& part : body["messages"][1]["content"])
            if (part.value("type", "") == "text") user += part.value("text", "");
        std::string reply;
        if (user.find("Bounding box coordinates") != std::string::npos) {
            // echo the modal bbox from the user text, grown three ways
            BBox modal{0, 0, 10, 10};
            std::sscanf(user.c_str(), "Bounding box coordinates: [%d, %d, %d, %d]",
                        &modal.x_min, &modal.y_min, &modal.x_max, &modal.y_max);
            reply = format_boxes({BBox{modal.x_min - 6, modal.y_min - 6, modal.x_max + 6,
                                       modal.y_max + 6},
                                  BBox{modal.x_min - 12, modal.y_min - 12, modal.x_max + 12,
                                       modal.y_max + 12},
                                  BBox{modal.x_min - 18, modal.y_min - 18, modal.x_max + 18,
                                       modal.y_max + 18}});
        } else if (user.find("hidden parts") != std::string::npos) {
            reply = "Prompt: a simple colored shape";
        } else {
            reply = R"({"requires_extensive_completion":"yes","category":"shape"})";
        }
        res.set_content(
            nlohmann::json{{"choices", {{{"message", {{"content", reply}}}}}}}.dump(),
            "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const fs::path cache_dir = fs::temp_directory_path() / "amodal_acceptance_cache";
    fs::remove_all(cache_dir);

    std::vector<SyntheticSample> samples;
    for (std::uint64_t seed = 900; seed < 904; ++seed) {
        SceneSpec scene_spec;
        scene_spec.min_occlusion = 0.3;
        scene_spec.max_occlusion = 0.8;
        samples.push_back(gen_scene(scene_spec, seed));
    }
    BackendRegistry backends = oracle_backends(samples);
    HttpChatOptions chat_options;
    chat_options.endpoint = "http://127.0.0.1:" + std::to_string(port);
    chat_options.model_id = "stub";
    chat_options.attempts = 2;
    chat_options.backoff_initial_ms = 1;
    auto cached = std::make_shared<CachingChatModel>(
        http_chat_backend(chat_options), std::make_shared<DirectoryStore>(cache_dir));
    backends.chat_small = cached;
    backends.chat_large = cached;

    std::vector<TargetSpec> specs;
    for (const auto& s : samples) specs.push_back(spec_of(s));

    PipelineConfig config;
    config.parallelism = 2;
    const auto first = run_batch(config, backends, specs);
    const int calls_first = network_calls.load();
    const auto second = run_batch(config, backends, specs);
    const int calls_second = network_calls.load() - calls_first;

    bool ok = calls_first > 0 && calls_second == 0;
    for (const auto& record : first) ok &= record.status == "ok";
    for (std::size_t i = 0; i < first.size(); ++i)
        ok &= first[i].to_json(false).dump() == second[i].to_json(false).dump();

    server.stop();
    server_thread.join();
    fs::remove_all(cache_dir);
    std::printf("  (first run: %d network calls, rerun: %d)\n", calls_first, calls_second);
    criterion_line(10, "response cache: zero chat network calls on rerun", ok);
}

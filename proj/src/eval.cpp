#include "amodal/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "amodal/errors.hpp"
#include "amodal/png_io.hpp"
#include "amodal/synth.hpp"

namespace amodal {

namespace {

std::string percent(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", value);
    return buffer;
}

std::string percent_or_dash(const std::optional<double>& value) {
    return value ? percent(*value) : std::string("-");
}

}  // namespace

double sample_occlusion_ratio(const AnnotatedSample& sample) {
    if (sample.dataset_occlusion_ratio) return *sample.dataset_occlusion_ratio;
    return occlusion_ratio(sample.target.modal, sample.gt_amodal_mask);
}

// --- SegReport ---------------------------------------------------------

nlohmann::ordered_json SegReport::to_json() const {
    auto stratum = [](const StratumStats& s) {
        return nlohmann::ordered_json{{"miou_percent", s.miou_percent}, {"count", s.count}};
    };
    return {{"kind", "amodal_segmentation"},
            {"hard", stratum(hard)},
            {"moderate", stratum(moderate)},
            {"easy", stratum(easy)},
            {"overall_percent", overall_percent},
            {"total", total},
            {"skipped", skipped}};
}

SegReport SegReport::from_json(const nlohmann::json& j) {
    auto stratum = [&](const char* name) {
        return StratumStats{j.at(name).at("miou_percent").get<double>(),
                            j.at(name).at("count").get<std::size_t>()};
    };
    SegReport out;
    out.hard = stratum("hard");
    out.moderate = stratum("moderate");
    out.easy = stratum("easy");
    out.overall_percent = j.at("overall_percent").get<double>();
    out.total = j.at("total").get<std::size_t>();
    out.skipped = j.at("skipped").get<std::size_t>();
    return out;
}

std::string SegReport::to_table() const {
    std::ostringstream out;
    char line[96];
    out << "stratum     count  mIoU(%)\n";
    std::snprintf(line, sizeof line, "%-10s %6zu  %7s\n", "hard", hard.count,
                  percent(hard.miou_percent).c_str());
    out << line;
    std::snprintf(line, sizeof line, "%-10s %6zu  %7s\n", "moderate", moderate.count,
                  percent(moderate.miou_percent).c_str());
    out << line;
    std::snprintf(line, sizeof line, "%-10s %6zu  %7s\n", "easy", easy.count,
                  percent(easy.miou_percent).c_str());
    out << line;
    std::snprintf(line, sizeof line, "%-10s %6zu  %7s\n", "overall", total,
                  percent(overall_percent).c_str());
    out << line;
    if (skipped) out << "(skipped " << skipped << " samples without usable GT)\n";
    return out.str();
}

SegReport eval_amodal_seg(const std::vector<std::pair<AnnotatedSample, BinaryMask>>& results) {
    SegReport report;
    double sums[3] = {0.0, 0.0, 0.0};
    std::size_t counts[3] = {0, 0, 0};

    for (const auto& [sample, predicted] : results) {
        if (sample.gt_amodal_mask.width() == 0 || !sample.gt_amodal_mask.any() ||
            predicted.size() != sample.gt_amodal_mask.size()) {
            ++report.skipped;
            continue;
        }
        const double ratio = sample_occlusion_ratio(sample);
        const OcclusionStratum stratum = stratify(ratio);
        const double value = iou(predicted, sample.gt_amodal_mask);
        const int idx = static_cast<int>(stratum);
        sums[idx] += value;
        ++counts[idx];
    }

    auto stats = [&](OcclusionStratum s) {
        const int idx = static_cast<int>(s);
        StratumStats out;
        out.count = counts[idx];
        out.miou_percent = counts[idx] ? 100.0 * sums[idx] / counts[idx] : 0.0;
        return out;
    };
    report.easy = stats(OcclusionStratum::Easy);
    report.moderate = stats(OcclusionStratum::Moderate);
    report.hard = stats(OcclusionStratum::Hard);
    report.total = counts[0] + counts[1] + counts[2];
    report.overall_percent =
        report.total ? 100.0 * (sums[0] + sums[1] + sums[2]) / report.total : 0.0;
    return report;
}

// --- OorReport ---------------------------------------------------------

nlohmann::ordered_json OorReport::to_json() const {
    nlohmann::ordered_json categories = nlohmann::ordered_json::object();
    for (const auto& [name, stats] : per_category)
        categories[name] = {{"count", stats.count},
                            {"top1_hits", stats.top1_hits},
                            {"top3_hits", stats.top3_hits}};
    return {{"kind", "occluded_object_recognition"},
            {"top1_percent", top1_percent},
            {"top3_percent", top3_percent},
            {"total", total},
            {"failures", failures},
            {"per_category", categories}};
}

OorReport OorReport::from_json(const nlohmann::json& j) {
    OorReport out;
    out.top1_percent = j.at("top1_percent").get<double>();
    out.top3_percent = j.at("top3_percent").get<double>();
    out.total = j.at("total").get<std::size_t>();
    out.failures = j.at("failures").get<std::size_t>();
    for (const auto& [name, stats] : j.at("per_category").items())
        out.per_category[name] = CategoryStats{stats.at("count").get<std::size_t>(),
                                               stats.at("top1_hits").get<std::size_t>(),
                                               stats.at("top3_hits").get<std::size_t>()};
    return out;
}

std::string OorReport::to_table() const {
    std::ostringstream out;
    char line[128];
    out << "metric   accuracy(%)\n";
    std::snprintf(line, sizeof line, "%-8s %11s\n", "top-1", percent(top1_percent).c_str());
    out << line;
    std::snprintf(line, sizeof line, "%-8s %11s\n", "top-3", percent(top3_percent).c_str());
    out << line;
    std::snprintf(line, sizeof line, "samples %zu, classifier failures %zu\n", total, failures);
    out << line;
    for (const auto& [name, stats] : per_category) {
        std::snprintf(line, sizeof line, "  %-16s n=%-5zu top1=%-5zu top3=%zu\n", name.c_str(),
                      stats.count, stats.top1_hits, stats.top3_hits);
        out << line;
    }
    return out.str();
}

OorReport eval_oor(const std::vector<OorInput>& results, ImageClassifier& classifier,
                   const std::vector<std::string>& labels) {
    if (labels.empty()) throw InvalidInputError("eval_oor: empty label set");
    OorReport report;
    std::size_t top1 = 0;
    std::size_t top3 = 0;
    for (const auto& input : results) {
        if (!input.sample.gt_category) {
            ++report.failures;
            continue;
        }
        const std::string& gt = *input.sample.gt_category;
        CategoryStats& stats = report.per_category[gt];
        ++stats.count;
        ++report.total;
        std::vector<std::string> ranked;
        try {
            const Image cutout =
                compose_on_background(input.amodal_image, input.amodal_mask, kWhite);
            ranked = classifier.classify(cutout, labels);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: classifier failed on %s: %s\n",
                         input.sample.target.sample_id.c_str(), e.what());
            ++report.failures;
            continue;  // counted as a miss
        }
        if (!ranked.empty() && ranked[0] == gt) {
            ++top1;
            ++stats.top1_hits;
        }
        const auto first3 = ranked.begin() + std::min<std::size_t>(3, ranked.size());
        if (std::find(ranked.begin(), first3, gt) != first3) {
            ++top3;
            ++stats.top3_hits;
        }
    }
    report.top1_percent = report.total ? 100.0 * top1 / report.total : 0.0;
    report.top3_percent = report.total ? 100.0 * top3 / report.total : 0.0;
    return report;
}

// --- GdmReport ---------------------------------------------------------

nlohmann::ordered_json GdmReport::to_json() const {
    nlohmann::ordered_json j{{"kind", "guidance_decision"},
                             {"high_count", high_count},
                             {"high_called", high_called},
                             {"low_count", low_count},
                             {"low_skipped", low_skipped}};
    if (gcr_percent) j["gcr_percent"] = *gcr_percent;
    if (gsr_percent) j["gsr_percent"] = *gsr_percent;
    return j;
}

GdmReport GdmReport::from_json(const nlohmann::json& j) {
    GdmReport out;
    out.high_count = j.at("high_count").get<std::size_t>();
    out.high_called = j.at("high_called").get<std::size_t>();
    out.low_count = j.at("low_count").get<std::size_t>();
    out.low_skipped = j.at("low_skipped").get<std::size_t>();
    if (j.contains("gcr_percent")) out.gcr_percent = j["gcr_percent"].get<double>();
    if (j.contains("gsr_percent")) out.gsr_percent = j["gsr_percent"].get<double>();
    return out;
}

std::string GdmReport::to_table() const {
    std::ostringstream out;
    out << "GCR(%)  GSR(%)\n";
    char line[64];
    std::snprintf(line, sizeof line, "%-7s %-7s\n", percent_or_dash(gcr_percent).c_str(),
                  percent_or_dash(gsr_percent).c_str());
    out << line;
    std::snprintf(line, sizeof line, "high-occlusion n=%zu, low-occlusion n=%zu\n", high_count,
                  low_count);
    out << line;
    return out.str();
}

GdmReport eval_gdm(const std::vector<std::pair<double, bool>>& ratio_and_requires) {
    GdmReport report;
    for (const auto& [ratio, requires_guidance] : ratio_and_requires) {
        if (ratio > 0.5) {
            ++report.high_count;
            if (requires_guidance) ++report.high_called;
        } else if (ratio < 0.1) {
            ++report.low_count;
            if (!requires_guidance) ++report.low_skipped;
        }
    }
    if (report.high_count)
        report.gcr_percent = 100.0 * report.high_called / report.high_count;
    if (report.low_count)
        report.gsr_percent = 100.0 * report.low_skipped / report.low_count;
    return report;
}

GdmReport eval_gdm(const std::vector<std::pair<AnnotatedSample, GuidanceDecision>>& decisions) {
    std::vector<std::pair<double, bool>> flat;
    flat.reserve(decisions.size());
    for (const auto& [sample, decision] : decisions)
        flat.emplace_back(sample_occlusion_ratio(sample),
                          decision.requires_extensive_completion);
    return eval_gdm(flat);
}

// --- mask accuracy -----------------------------------------------------

double eval_mask_accuracy(const std::vector<std::pair<BinaryMask, BinaryMask>>& pairs) {
    if (pairs.empty()) throw InvalidInputError("eval_mask_accuracy: no pairs");
    double sum = 0.0;
    for (const auto& [ours, reference] : pairs) sum += iou(ours, reference);
    return 100.0 * sum / pairs.size();
}

std::pair<BinaryMask, BinaryMask> mask_accuracy_pair(const BinaryMask& inpaint_mask,
                                                     const BBox& chosen_box,
                                                     const BinaryMask& gt_amodal_mask) {
    const BBox ours = chosen_box.clamped(inpaint_mask.size());
    const BBox gt_box = mask_to_bbox(gt_amodal_mask);
    BinaryMask ours_mask = ours.area() > 0 ? intersect_bbox_mask(ours, inpaint_mask)
                                           : BinaryMask(inpaint_mask.height(), inpaint_mask.width());
    return {std::move(ours_mask), intersect_bbox_mask(gt_box, inpaint_mask)};
}

// --- loading -----------------------------------------------------------

namespace {

void finish_sample(AnnotatedSample& sample, LoadResult& out) {
    if (!mask_subset(sample.target.modal, sample.gt_amodal_mask)) {
        sample.gt_amodal_mask = mask_union(sample.gt_amodal_mask, sample.target.modal);
        sample.containment_repaired = true;
        ++out.repaired;
    }
}

void load_generic_json(const std::filesystem::path& path, LoadResult& out) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open annotations: " + path.string());
    const nlohmann::json root = nlohmann::json::parse(in, nullptr, false);
    if (root.is_discarded() || !root.is_object() || !root.contains("samples") ||
        !root["samples"].is_array())
        throw InvalidInputError("annotations must be {\"samples\": [...]}: " + path.string());

    const auto base = path.parent_path();
    std::size_t index = 0;
    for (const auto& record : root["samples"]) {
        const std::string label = "record " + std::to_string(index++);
        try {
            if (!record.is_object() || !record.contains("image") ||
                !record.contains("modal_mask") || !record.contains("amodal_mask"))
                throw InvalidInputError("missing image/modal_mask/amodal_mask");
            AnnotatedSample sample;
            sample.target.sample_id =
                record.value("id", "sample_" + std::to_string(index - 1));
            sample.target.image = read_png_image(base / record["image"].get<std::string>());
            sample.target.modal = read_png_mask(base / record["modal_mask"].get<std::string>());
            sample.gt_amodal_mask =
                read_png_mask(base / record["amodal_mask"].get<std::string>());
            if (record.contains("category")) {
                sample.gt_category = record["category"].get<std::string>();
                sample.target.category_hint = sample.gt_category;
            }
            if (record.contains("occlusion_ratio"))
                sample.dataset_occlusion_ratio = record["occlusion_ratio"].get<double>();
            if (sample.target.image.size() != sample.target.modal.size() ||
                sample.target.image.size() != sample.gt_amodal_mask.size())
                throw InvalidInputError("image/mask dimensions differ");
            if (!sample.target.modal.any()) throw InvalidInputError("empty modal mask");
            finish_sample(sample, out);
            out.samples.push_back(std::move(sample));
        } catch (const std::exception& e) {
            out.errors.push_back(label + ": " + e.what());
        }
    }
}

void load_synth_dir(const std::filesystem::path& path, LoadResult& out) {
    if (!std::filesystem::is_directory(path))
        throw InvalidInputError("not a directory: " + path.string());
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(path))
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "meta.json"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());

    for (const auto& dir : dirs) {
        try {
            const SyntheticSample synth = load_sample(dir);
            AnnotatedSample sample;
            sample.target.sample_id = synth.sample_id;
            sample.target.image = synth.image;
            sample.target.modal = synth.modal;
            sample.target.category_hint = synth.category;
            sample.gt_amodal_mask = synth.gt_amodal_mask;
            sample.gt_category = synth.category;
            sample.dataset_occlusion_ratio = synth.occlusion_ratio;
            if (!sample.target.modal.any()) throw InvalidInputError("empty modal mask");
            finish_sample(sample, out);
            out.samples.push_back(std::move(sample));
        } catch (const std::exception& e) {
            out.errors.push_back(dir.filename().string() + ": " + e.what());
        }
    }
}

}  // namespace

LoadResult load_annotations(const std::filesystem::path& path, AnnotationFormat format) {
    LoadResult out;
    if (format == AnnotationFormat::GenericJson)
        load_generic_json(path, out);
    else
        load_synth_dir(path, out);
    return out;
}

}  // namespace amodal

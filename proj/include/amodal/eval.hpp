#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "amodal/backends.hpp"
#include "amodal/decision.hpp"
#include "amodal/image.hpp"
#include "amodal/mask.hpp"
#include "amodal/pipeline.hpp"

namespace amodal {

// A pipeline input paired with evaluation ground truth.
struct AnnotatedSample {
    TargetSpec target;
    BinaryMask gt_amodal_mask;
    std::optional<std::string> gt_category;
    std::optional<double> dataset_occlusion_ratio;
    bool containment_repaired = false;  // modal was unioned into a noisy GT mask
};

// Occlusion ratio for stratification: the dataset-provided value when present,
// otherwise derived from the masks.
double sample_occlusion_ratio(const AnnotatedSample& sample);

struct StratumStats {
    double miou_percent = 0.0;
    std::size_t count = 0;

    friend bool operator==(const StratumStats&, const StratumStats&) = default;
};

struct SegReport {
    StratumStats hard;
    StratumStats moderate;
    StratumStats easy;
    double overall_percent = 0.0;  // count-weighted mean of the strata
    std::size_t total = 0;
    std::size_t skipped = 0;       // samples without usable GT

    nlohmann::ordered_json to_json() const;
    static SegReport from_json(const nlohmann::json& j);
    std::string to_table() const;

    friend bool operator==(const SegReport&, const SegReport&) = default;
};

struct CategoryStats {
    std::size_t count = 0;
    std::size_t top1_hits = 0;
    std::size_t top3_hits = 0;

    friend bool operator==(const CategoryStats&, const CategoryStats&) = default;
};

struct OorReport {
    double top1_percent = 0.0;
    double top3_percent = 0.0;
    std::size_t total = 0;
    std::size_t failures = 0;  // classifier errors, counted as misses
    std::map<std::string, CategoryStats> per_category;

    nlohmann::ordered_json to_json() const;
    static OorReport from_json(const nlohmann::json& j);
    std::string to_table() const;

    friend bool operator==(const OorReport&, const OorReport&) = default;
};

struct GdmReport {
    std::optional<double> gcr_percent;  // absent when no high-occlusion samples exist
    std::optional<double> gsr_percent;  // absent when no low-occlusion samples exist
    std::size_t high_count = 0;
    std::size_t high_called = 0;
    std::size_t low_count = 0;
    std::size_t low_skipped = 0;

    nlohmann::ordered_json to_json() const;
    static GdmReport from_json(const nlohmann::json& j);
    std::string to_table() const;

    friend bool operator==(const GdmReport&, const GdmReport&) = default;
};

// Stratified amodal-segmentation mIoU of predicted masks against GT.
SegReport eval_amodal_seg(
    const std::vector<std::pair<AnnotatedSample, BinaryMask>>& results);

struct OorInput {
    AnnotatedSample sample;
    Image amodal_image;
    BinaryMask amodal_mask;
};

// Occluded object recognition: each completed object composited on white via
// its predicted amodal mask and classified over the label set.
OorReport eval_oor(const std::vector<OorInput>& results, ImageClassifier& classifier,
                   const std::vector<std::string>& labels);

// Guidance decision quality. Call rate over samples occluded more than half,
// skip rate over samples occluded less than a tenth.
GdmReport eval_gdm(const std::vector<std::pair<double, bool>>& ratio_and_requires);
GdmReport eval_gdm(const std::vector<std::pair<AnnotatedSample, GuidanceDecision>>& decisions);

// Mean IoU (percent) between the pipeline's resized inpainting mask and the
// one resized with the GT full-object bbox.
double eval_mask_accuracy(const std::vector<std::pair<BinaryMask, BinaryMask>>& pairs);

// Builds one mask-accuracy pair: (chosen_box ∩ inpaint, gt_bbox ∩ inpaint).
std::pair<BinaryMask, BinaryMask> mask_accuracy_pair(const BinaryMask& inpaint_mask,
                                                     const BBox& chosen_box,
                                                     const BinaryMask& gt_amodal_mask);

enum class AnnotationFormat { GenericJson, SynthDir };

struct LoadResult {
    std::vector<AnnotatedSample> samples;
    std::vector<std::string> errors;  // one entry per unloadable record
    std::size_t repaired = 0;         // containment repairs applied
};

// generic-json: one JSON file {"samples": [{id, image, modal_mask,
// amodal_mask, category?, occlusion_ratio?}]} with paths relative to the file.
// synth-dir: a directory of synthetic sample directories.
LoadResult load_annotations(const std::filesystem::path& path, AnnotationFormat format);

}  // namespace amodal

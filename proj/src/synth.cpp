#include "amodal/synth.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>

#include <nlohmann/json.hpp>

#include "amodal/decision.hpp"
#include "amodal/errors.hpp"
#include "amodal/geometric.hpp"
#include "amodal/json_util.hpp"
#include "amodal/png_io.hpp"
#include "amodal/semantic.hpp"

namespace amodal {

namespace {

constexpr RGB kObjectPalette[] = {
    {200, 60, 60}, {60, 160, 60},  {70, 90, 200},  {220, 160, 50},
    {170, 70, 190}, {60, 180, 180}, {230, 120, 150}, {150, 110, 60},
    {90, 200, 120}, {200, 200, 70}, {120, 130, 220}, {210, 90, 40},
};
constexpr RGB kBackgroundPalette[] = {
    {235, 240, 235}, {225, 230, 245}, {245, 235, 225}, {230, 225, 235}};

// Object bboxes stay this far from the canvas edge, leaving room for the
// oracle's coarse guidance box so clamping never forces a boundary touch.
constexpr int kPlacementPad = 22;

void fill_rect(BinaryMask& mask, const BBox& box) {
    const BBox b = box.clamped(mask.size());
    for (int y = b.y_min; y < b.y_max; ++y)
        for (int x = b.x_min; x < b.x_max; ++x) mask.set(y, x, true);
}

void fill_ellipse(BinaryMask& mask, const BBox& box) {
    const double cx = (box.x_min + box.x_max - 1) / 2.0;
    const double cy = (box.y_min + box.y_max - 1) / 2.0;
    const double rx = std::max(0.5, (box.x_max - box.x_min) / 2.0);
    const double ry = std::max(0.5, (box.y_max - box.y_min) / 2.0);
    const BBox b = box.clamped(mask.size());
    for (int y = b.y_min; y < b.y_max; ++y)
        for (int x = b.x_min; x < b.x_max; ++x) {
            const double nx = (x - cx) / rx;
            const double ny = (y - cy) / ry;
            if (nx * nx + ny * ny <= 1.0) mask.set(y, x, true);
        }
}

BinaryMask object_mask(ShapeKind kind, const BBox& box, const ImageSize& canvas,
                       SplitMix64& rng) {
    BinaryMask mask(canvas.height, canvas.width);
    switch (kind) {
        case ShapeKind::Rect:
            fill_rect(mask, box);
            break;
        case ShapeKind::Ellipse:
            fill_ellipse(mask, box);
            break;
        case ShapeKind::Sprite: {
            // a rect body with an elliptical lobe, both inside the bbox
            const int w = box.width();
            const int h = box.height();
            fill_rect(mask, BBox{box.x_min, box.y_min + h / 4, box.x_min + (w * 2) / 3,
                                 box.y_max});
            fill_ellipse(mask, BBox{box.x_min + w / 3, box.y_min, box.x_max, box.y_min + (h * 2) / 3});
            if (rng.range(0, 1) == 1)
                fill_rect(mask, BBox{box.x_min + (w * 2) / 3, box.y_max - h / 3, box.x_max, box.y_max});
            break;
        }
    }
    return mask;
}

BinaryMask occluder_shape(SplitMix64& rng, const ImageSize& canvas, const BBox& object_bbox,
                          double size_scale) {
    // anchor on the object's bbox perimeter so occluders actually overlap it
    const int side = rng.range(0, 3);
    int ax = 0;
    int ay = 0;
    switch (side) {
        case 0: ax = rng.range(object_bbox.x_min, object_bbox.x_max - 1); ay = object_bbox.y_min; break;
        case 1: ax = rng.range(object_bbox.x_min, object_bbox.x_max - 1); ay = object_bbox.y_max - 1; break;
        case 2: ax = object_bbox.x_min; ay = rng.range(object_bbox.y_min, object_bbox.y_max - 1); break;
        default: ax = object_bbox.x_max - 1; ay = rng.range(object_bbox.y_min, object_bbox.y_max - 1); break;
    }
    const int base_w = std::max(6, static_cast<int>(object_bbox.width() * size_scale *
                                                    (0.6 + 0.8 * rng.unit())));
    const int base_h = std::max(6, static_cast<int>(object_bbox.height() * size_scale *
                                                    (0.6 + 0.8 * rng.unit())));
    const int jitter_x = rng.range(-base_w / 3, base_w / 3);
    const int jitter_y = rng.range(-base_h / 3, base_h / 3);
    const BBox box = BBox{ax + jitter_x - base_w / 2, ay + jitter_y - base_h / 2,
                          ax + jitter_x + (base_w + 1) / 2, ay + jitter_y + (base_h + 1) / 2}
                         .clamped(canvas);

    BinaryMask mask(canvas.height, canvas.width);
    if (box.area() == 0) return mask;
    if (rng.range(0, 1) == 0)
        fill_rect(mask, box);
    else
        fill_ellipse(mask, box);
    return mask;
}

RGB pick_distinct(SplitMix64& rng, const std::vector<RGB>& taken) {
    for (int tries = 0; tries < 64; ++tries) {
        const RGB c = kObjectPalette[rng.range(0, static_cast<int>(std::size(kObjectPalette)) - 1)];
        if (std::find(taken.begin(), taken.end(), c) == taken.end()) return c;
    }
    return kObjectPalette[0];
}

std::uint64_t image_key(const Image& image) {
    return fnv1a64(std::span<const std::uint8_t>(image.data().data(), image.data().size()),
                   0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(image.width()));
}

}  // namespace

const char* to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::Rect: return "rectangle";
        case ShapeKind::Ellipse: return "ellipse";
        case ShapeKind::Sprite: return "sprite";
    }
    return "?";
}

std::vector<BinaryMask> SyntheticSample::visible_occluder_segments() const {
    std::vector<BinaryMask> segments;
    segments.reserve(occluder_masks.size());
    for (std::size_t k = 0; k < occluder_masks.size(); ++k) {
        BinaryMask visible = occluder_masks[k];
        for (std::size_t later = k + 1; later < occluder_masks.size(); ++later)
            visible = mask_subtract(visible, occluder_masks[later]);
        segments.push_back(std::move(visible));
    }
    return segments;
}

SyntheticSample gen_scene(const SceneSpec& spec, std::uint64_t seed) {
    if (spec.min_occlusion < 0.0 || spec.max_occlusion >= 1.0 ||
        spec.min_occlusion > spec.max_occlusion)
        throw InvalidInputError("gen_scene: occlusion range must sit inside [0, 1)");
    if (spec.canvas.height < 64 || spec.canvas.width < 64)
        throw InvalidInputError("gen_scene: canvas too small");

    SplitMix64 rng(seed ^ 0xa0da1c05ULL);

    SyntheticSample sample;
    sample.seed = seed;
    sample.category = to_string(spec.shape);
    sample.sample_id = std::string("synth_") + to_string(spec.shape) + "_" + std::to_string(seed);

    std::vector<RGB> taken;
    const RGB background = kBackgroundPalette[rng.range(0, static_cast<int>(std::size(kBackgroundPalette)) - 1)];
    const RGB object_color = pick_distinct(rng, taken);
    taken.push_back(object_color);

    const ImageSize canvas = spec.canvas;
    const int max_w = std::min(canvas.width - 2 * kPlacementPad, canvas.width / 2);
    const int max_h = std::min(canvas.height - 2 * kPlacementPad, canvas.height / 2);
    const int obj_w = rng.range(std::max(16, max_w / 2), max_w);
    const int obj_h = rng.range(std::max(16, max_h / 2), max_h);
    const int obj_x = rng.range(kPlacementPad, canvas.width - kPlacementPad - obj_w);
    const int obj_y = rng.range(kPlacementPad, canvas.height - kPlacementPad - obj_h);
    const BBox object_bbox{obj_x, obj_y, obj_x + obj_w, obj_y + obj_h};

    sample.gt_amodal_mask = object_mask(spec.shape, object_bbox, canvas, rng);
    if (!sample.gt_amodal_mask.any()) throw GenerationFailedError("gen_scene: empty object");

    sample.gt_amodal_image = Image(canvas.height, canvas.width, background);
    for (int y = 0; y < canvas.height; ++y)
        for (int x = 0; x < canvas.width; ++x)
            if (sample.gt_amodal_mask.at(y, x)) sample.gt_amodal_image.set(y, x, object_color);

    // occluder placement with multiplicative size feedback on the ratio
    const int occluders = std::max(0, spec.occluder_count);
    double size_scale = 0.8;
    constexpr int kMaxAttempts = 250;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::vector<BinaryMask> masks;
        BinaryMask covered(canvas.height, canvas.width);
        for (int k = 0; k < occluders; ++k) {
            BinaryMask m = occluder_shape(rng, canvas, object_bbox, size_scale);
            covered = mask_union(covered, m);
            masks.push_back(std::move(m));
        }
        if (occluders == 0) {
            sample.occluder_masks.clear();
            sample.modal = sample.gt_amodal_mask;
            sample.occlusion_ratio = 0.0;
            if (spec.min_occlusion > 0.0)
                throw GenerationFailedError("gen_scene: range excludes the unoccluded case");
            break;
        }

        const BinaryMask modal = mask_subtract(sample.gt_amodal_mask, covered);
        if (!modal.any()) {
            size_scale *= 0.8;
            continue;
        }
        const double ratio = occlusion_ratio(modal, sample.gt_amodal_mask);
        if (ratio < spec.min_occlusion) {
            size_scale = std::min(4.0, size_scale * 1.2);
            continue;
        }
        if (ratio > spec.max_occlusion) {
            size_scale = std::max(0.05, size_scale * 0.85);
            continue;
        }

        // every occluder that hides target pixels must be discoverable through
        // the adjacency ring, or the scene has no exact completion
        SyntheticSample candidate = sample;
        candidate.occluder_masks = masks;
        candidate.modal = modal;
        const BinaryMask hidden = mask_subtract(sample.gt_amodal_mask, modal);
        const BinaryMask ring = mask_dilate(modal, OccluderParams{}.adjacency_radius_px);
        bool discoverable = true;
        for (const auto& visible : candidate.visible_occluder_segments()) {
            if (!mask_intersect(visible, hidden).any()) continue;
            if (!mask_intersect(visible, ring).any()) {
                discoverable = false;
                break;
            }
        }
        if (!discoverable) continue;

        sample.occluder_masks = std::move(candidate.occluder_masks);
        sample.modal = modal;
        sample.occlusion_ratio = ratio;
        break;
    }
    if (occluders > 0 && sample.occluder_masks.empty())
        throw GenerationFailedError("gen_scene: could not reach the requested occlusion range");

    // scene render: background, object, occluders on top in draw order
    sample.image = sample.gt_amodal_image;
    for (const auto& m : sample.occluder_masks) {
        const RGB color = pick_distinct(rng, taken);
        taken.push_back(color);
        for (int y = 0; y < canvas.height; ++y)
            for (int x = 0; x < canvas.width; ++x)
                if (m.at(y, x)) sample.image.set(y, x, color);
    }
    return sample;
}

namespace {

class OracleSegmenter : public Segmenter {
public:
    OracleSegmenter(std::map<std::uint64_t, SyntheticSample> by_scene, RGB canvas_gray)
        : by_scene_(std::move(by_scene)), canvas_gray_(canvas_gray) {}

    std::vector<BinaryMask> segment_all(const Image& image) override {
        const auto it = by_scene_.find(image_key(image));
        if (it == by_scene_.end())
            throw MalformedResponseError("oracle segmenter: unknown scene image");
        const SyntheticSample& s = it->second;
        std::vector<BinaryMask> segments;
        segments.push_back(s.modal);
        BinaryMask foreground = s.modal;
        for (auto& visible : s.visible_occluder_segments()) {
            foreground = mask_union(foreground, visible);
            if (visible.any()) segments.push_back(std::move(visible));
        }
        segments.push_back(mask_invert(foreground));  // background segment
        return segments;
    }

    BinaryMask segment_region(const Image& image, const std::vector<PixelPoint>&) override {
        return gray_background(image);
    }
    BinaryMask segment_region(const Image& image, const BBox&) override {
        return gray_background(image);
    }

private:
    BinaryMask gray_background(const Image& image) const {
        // on the composed canvas the background is exactly the canvas gray
        BinaryMask out(image.height(), image.width());
        for (int y = 0; y < image.height(); ++y)
            for (int x = 0; x < image.width(); ++x)
                if (image.at(y, x) == canvas_gray_) out.set(y, x, true);
        return out;
    }

    std::map<std::uint64_t, SyntheticSample> by_scene_;
    RGB canvas_gray_;
};

class OracleOrderPredictor : public OcclusionOrderPredictor {
public:
    explicit OracleOrderPredictor(std::map<std::uint64_t, SyntheticSample> by_scene)
        : by_scene_(std::move(by_scene)) {}

    OrderMatrix predict_order(const Image& image, const std::vector<BinaryMask>& masks) override {
        const auto it = by_scene_.find(image_key(image));
        if (it == by_scene_.end())
            throw MalformedResponseError("oracle order predictor: unknown scene image");
        const SyntheticSample& s = it->second;
        const auto visible = s.visible_occluder_segments();
        const BinaryMask hidden = s.hidden_region();

        // identify each query mask: -1 target, k >= 0 occluder index, -2 other
        std::vector<int> identity(masks.size(), -2);
        for (std::size_t i = 0; i < masks.size(); ++i) {
            if (masks[i] == s.modal) {
                identity[i] = -1;
                continue;
            }
            for (std::size_t k = 0; k < visible.size(); ++k)
                if (masks[i] == visible[k]) {
                    identity[i] = static_cast<int>(k);
                    break;
                }
        }

        OrderMatrix matrix(static_cast<int>(masks.size()));
        for (std::size_t i = 0; i < masks.size(); ++i) {
            for (std::size_t j = i + 1; j < masks.size(); ++j) {
                const int a = identity[i];
                const int b = identity[j];
                if (a == -2 || b == -2 || a == b) continue;
                if (a >= 0 && b == -1) {
                    if (mask_intersect(visible[a], hidden).any())
                        matrix.set(static_cast<int>(i), static_cast<int>(j),
                                   OrderRelation::FirstOccludesSecond);
                } else if (a == -1 && b >= 0) {
                    if (mask_intersect(visible[b], hidden).any())
                        matrix.set(static_cast<int>(i), static_cast<int>(j),
                                   OrderRelation::SecondOccludesFirst);
                } else if (a >= 0 && b >= 0) {
                    // later-drawn occluders sit on top of earlier ones
                    if (mask_intersect(s.occluder_masks[a], s.occluder_masks[b]).any())
                        matrix.set(static_cast<int>(i), static_cast<int>(j),
                                   a > b ? OrderRelation::FirstOccludesSecond
                                         : OrderRelation::SecondOccludesFirst);
                }
            }
        }
        return matrix;
    }

private:
    std::map<std::uint64_t, SyntheticSample> by_scene_;
};

class OracleInpainter : public Inpainter {
public:
    explicit OracleInpainter(std::map<std::uint64_t, SyntheticSample> by_canvas)
        : by_canvas_(std::move(by_canvas)) {}

    Image inpaint(const Image& image, const BinaryMask& region, const std::string&) override {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto it = by_canvas_.find(image_key(image));
        if (it == by_canvas_.end())
            throw MalformedResponseError("oracle inpainter: unknown canvas");
        const SyntheticSample& s = it->second;
        Image out = image;
        for (int y = 0; y < image.height(); ++y)
            for (int x = 0; x < image.width(); ++x)
                if (region.at(y, x) && s.gt_amodal_mask.at(y, x))
                    out.set(y, x, s.gt_amodal_image.at(y, x));
        // remember the painted canvas so repainting it stays well-defined
        by_canvas_.emplace(image_key(out), s);
        return out;
    }

private:
    std::map<std::uint64_t, SyntheticSample> by_canvas_;
    std::mutex mutex_;
};

class OracleClassifier : public ImageClassifier {
public:
    explicit OracleClassifier(std::map<std::uint64_t, std::string> category_by_cutout)
        : category_by_cutout_(std::move(category_by_cutout)) {}

    std::vector<std::string> classify(const Image& image,
                                      const std::vector<std::string>& labels) override {
        const auto it = category_by_cutout_.find(image_key(image));
        if (it == category_by_cutout_.end())
            throw MalformedResponseError("oracle classifier: unknown cutout image");
        std::vector<std::string> ranked;
        if (std::find(labels.begin(), labels.end(), it->second) != labels.end())
            ranked.push_back(it->second);
        for (const auto& label : labels)
            if (label != it->second) ranked.push_back(label);
        return ranked;
    }

private:
    std::map<std::uint64_t, std::string> category_by_cutout_;
};

struct OracleAnswers {
    std::string decision;
    std::string boxes;
    std::string description;
};

OracleAnswers oracle_answers(const SyntheticSample& sample, const OracleOptions& options) {
    OracleAnswers out;
    const bool needs_guidance = sample.occlusion_ratio >= options.requires_threshold;
    out.decision = std::string("{\"requires_extensive_completion\": \"") +
                   (needs_guidance ? "yes" : "no") + "\", \"category\": \"" + sample.category +
                   "\"}";

    const BBox gt = mask_to_bbox(sample.gt_amodal_mask);
    const ImageSize canvas = sample.image.size();
    auto grown = [&](int margin) {
        return BBox{gt.x_min - margin, gt.y_min - margin, gt.x_max + margin, gt.y_max + margin}
            .clamped(canvas);
    };
    out.boxes = format_boxes({grown(options.tight_margin_px), grown(options.moderate_margin_px),
                              grown(options.coarse_margin_px)});
    out.description = "Prompt: a complete " + sample.category + ", solid color, flat shading";
    return out;
}

class OracleChatModel : public ChatVisionModel {
public:
    explicit OracleChatModel(std::map<std::uint64_t, std::string> by_visual)
        : by_visual_(std::move(by_visual)) {}

    std::string chat(const ChatVisionRequest& request) override {
        validate_chat_request(request);
        const auto it = by_visual_.find(image_key(request.image));
        if (it == by_visual_.end())
            throw MalformedResponseError("oracle chat: unknown visual prompt");
        return it->second;
    }
    std::string id() const override { return "oracle-chat"; }

private:
    std::map<std::uint64_t, std::string> by_visual_;
};

}  // namespace

std::vector<ScriptEntry> oracle_chat_script(const SyntheticSample& sample,
                                            const OracleOptions& options) {
    const OracleAnswers answers = oracle_answers(sample, options);
    return {
        ScriptEntry{"JSON object", answers.decision},
        ScriptEntry{"Bounding box coordinates", answers.boxes},
        ScriptEntry{"hidden parts", answers.description},
    };
}

BackendRegistry oracle_backends(const std::vector<SyntheticSample>& samples,
                                const OracleOptions& options) {
    std::map<std::uint64_t, SyntheticSample> by_scene;
    std::map<std::uint64_t, SyntheticSample> by_canvas;
    std::map<std::uint64_t, std::string> by_cutout;
    std::map<std::uint64_t, std::string> by_visual;

    for (const auto& sample : samples) {
        by_scene[image_key(sample.image)] = sample;
        by_canvas[image_key(compose_on_background(sample.image, sample.modal,
                                                  options.canvas_gray))] = sample;
        by_cutout[image_key(compose_on_background(sample.gt_amodal_image, sample.gt_amodal_mask,
                                                  kWhite))] = sample.category;

        const OracleAnswers answers = oracle_answers(sample, options);
        const Image decision_visual = build_decision_visual_prompt(
            sample.image, sample.modal, options.crop_margin_px, options.stroke_px);
        by_visual[image_key(decision_visual)] = answers.decision;

        Image geometric_visual = compose_on_background(sample.image, sample.modal, kWhite);
        draw_box_outline(geometric_visual, mask_to_bbox(sample.modal), kRed, options.stroke_px);
        by_visual[image_key(geometric_visual)] = answers.boxes;

        // the semantic visual depends on the detected inpaint mask, which the
        // oracle segment/order implementations reproduce exactly
        const BinaryMask inpaint =
            build_inpaint_mask(sample.visible_occluder_segments(), sample.modal);
        const Image semantic_visual =
            build_semantic_visual_prompt(sample.image, sample.modal, inpaint, options.canvas_gray,
                                         options.crop_margin_px, options.stroke_px);
        by_visual[image_key(semantic_visual)] = answers.description;
    }

    BackendRegistry registry;
    auto chat = std::make_shared<OracleChatModel>(std::move(by_visual));
    registry.chat_small = chat;
    registry.chat_large = chat;
    registry.segmenter = std::make_shared<OracleSegmenter>(by_scene, options.canvas_gray);
    registry.order_predictor = std::make_shared<OracleOrderPredictor>(by_scene);
    registry.inpainter = std::make_shared<OracleInpainter>(std::move(by_canvas));
    registry.classifier = std::make_shared<OracleClassifier>(std::move(by_cutout));
    return registry;
}

BackendRegistry oracle_backends(const SyntheticSample& sample, const OracleOptions& options) {
    return oracle_backends(std::vector<SyntheticSample>{sample}, options);
}

void save_sample(const SyntheticSample& sample, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_png(dir / "image.png", sample.image);
    write_png(dir / "modal.png", sample.modal);
    write_png(dir / "amodal.png", sample.gt_amodal_mask);
    write_png(dir / "amodal_image.png", sample.gt_amodal_image);
    for (std::size_t k = 0; k < sample.occluder_masks.size(); ++k) {
        char name[48];
        std::snprintf(name, sizeof name, "occluder_%02zu.png", k);
        write_png(dir / name, sample.occluder_masks[k]);
    }
    nlohmann::ordered_json meta{{"schema_version", 1},
                                {"sample_id", sample.sample_id},
                                {"seed", sample.seed},
                                {"category", sample.category},
                                {"occlusion_ratio", sample.occlusion_ratio},
                                {"occluder_count", sample.occluder_masks.size()}};
    std::ofstream out(dir / "meta.json", std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "meta.json").string());
    out << meta.dump(2) << "\n";
}

SyntheticSample load_sample(const std::filesystem::path& dir) {
    std::ifstream meta_in(dir / "meta.json");
    if (!meta_in) throw InvalidInputError("not a sample directory: " + dir.string());
    const nlohmann::json meta = nlohmann::json::parse(meta_in, nullptr, false);
    if (meta.is_discarded())
        throw InvalidInputError("malformed meta.json in " + dir.string());

    SyntheticSample sample;
    sample.sample_id = meta.value("sample_id", dir.filename().string());
    sample.seed = meta.value("seed", std::uint64_t{0});
    sample.category = meta.value("category", std::string{"object"});
    sample.occlusion_ratio = meta.value("occlusion_ratio", 0.0);
    sample.image = read_png_image(dir / "image.png");
    sample.modal = read_png_mask(dir / "modal.png");
    sample.gt_amodal_mask = read_png_mask(dir / "amodal.png");
    if (std::filesystem::exists(dir / "amodal_image.png"))
        sample.gt_amodal_image = read_png_image(dir / "amodal_image.png");
    const std::size_t occluders = meta.value("occluder_count", std::size_t{0});
    for (std::size_t k = 0; k < occluders; ++k) {
        char name[48];
        std::snprintf(name, sizeof name, "occluder_%02zu.png", k);
        if (std::filesystem::exists(dir / name))
            sample.occluder_masks.push_back(read_png_mask(dir / name));
    }
    return sample;
}

}  // namespace amodal

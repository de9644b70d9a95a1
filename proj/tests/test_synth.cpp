#include <doctest.h>

#include <filesystem>

#include "amodal/errors.hpp"
#include "amodal/synth.hpp"
#include "scene_support.hpp"
#include "support.hpp"

using namespace amodal;
using testsupport::HandScene;

namespace {

bool samples_equal(const SyntheticSample& a, const SyntheticSample& b) {
    return a.image == b.image && a.gt_amodal_image == b.gt_amodal_image &&
           a.gt_amodal_mask == b.gt_amodal_mask && a.modal == b.modal &&
           a.occluder_masks == b.occluder_masks && a.occlusion_ratio == b.occlusion_ratio &&
           a.category == b.category && a.seed == b.seed;
}

}  // namespace

TEST_CASE("gen_scene is bit-deterministic for (spec, seed)") {
    SceneSpec spec;
    spec.shape = ShapeKind::Rect;
    spec.occluder_count = 1;
    spec.min_occlusion = 0.5;
    spec.max_occlusion = 0.7;
    CHECK(samples_equal(gen_scene(spec, 7), gen_scene(spec, 7)));
    CHECK_FALSE(samples_equal(gen_scene(spec, 7), gen_scene(spec, 8)));
}

TEST_CASE("gen_scene hits the requested occlusion range with consistent GT") {
    for (const ShapeKind shape : {ShapeKind::Rect, ShapeKind::Ellipse, ShapeKind::Sprite}) {
        SceneSpec spec;
        spec.shape = shape;
        spec.occluder_count = 2;
        spec.min_occlusion = 0.5;
        spec.max_occlusion = 0.7;
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            const SyntheticSample s = gen_scene(spec, seed);
            CHECK(s.occlusion_ratio >= 0.5);
            CHECK(s.occlusion_ratio <= 0.7);
            // stored ratio is exactly what maskcore recomputes
            CHECK(s.occlusion_ratio ==
                  doctest::Approx(occlusion_ratio(s.modal, s.gt_amodal_mask)).epsilon(1e-9));
            // modal = GT minus the union of occluders
            BinaryMask covered(s.image.height(), s.image.width());
            for (const auto& m : s.occluder_masks) covered = mask_union(covered, m);
            CHECK(s.modal == mask_subtract(s.gt_amodal_mask, covered));
        }
    }
}

TEST_CASE("gen_scene zero occluders means a fully visible object") {
    SceneSpec spec;
    spec.occluder_count = 0;
    spec.min_occlusion = 0.0;
    spec.max_occlusion = 0.0;
    const SyntheticSample s = gen_scene(spec, 5);
    CHECK(s.modal == s.gt_amodal_mask);
    CHECK(s.occlusion_ratio == 0.0);
    CHECK(s.image == s.gt_amodal_image);
}

TEST_CASE("gen_scene rejects unreachable ranges") {
    SceneSpec spec;
    spec.occluder_count = 0;
    spec.min_occlusion = 0.4;
    spec.max_occlusion = 0.5;
    CHECK_THROWS_AS(gen_scene(spec, 1), GenerationFailedError);

    SceneSpec bad;
    bad.min_occlusion = 0.5;
    bad.max_occlusion = 1.0;  // range must sit inside [0, 1)
    CHECK_THROWS_AS(gen_scene(bad, 1), InvalidInputError);
}

TEST_CASE("samples round-trip through the directory layout") {
    SceneSpec spec;
    spec.occluder_count = 2;
    spec.min_occlusion = 0.3;
    spec.max_occlusion = 0.8;
    const SyntheticSample s = gen_scene(spec, 21);

    const auto dir = std::filesystem::temp_directory_path() / "amodal_synth_roundtrip";
    std::filesystem::remove_all(dir);
    save_sample(s, dir);
    const SyntheticSample loaded = load_sample(dir);
    CHECK(loaded.image == s.image);
    CHECK(loaded.modal == s.modal);
    CHECK(loaded.gt_amodal_mask == s.gt_amodal_mask);
    CHECK(loaded.gt_amodal_image == s.gt_amodal_image);
    CHECK(loaded.occluder_masks == s.occluder_masks);
    CHECK(loaded.occlusion_ratio == doctest::Approx(s.occlusion_ratio).epsilon(1e-12));
    CHECK(loaded.category == s.category);
    CHECK(loaded.seed == s.seed);
    std::filesystem::remove_all(dir);
}

TEST_CASE("oracle inpainter completes exactly within a covering region") {
    HandScene scene;
    const SyntheticSample& s = scene.sample;
    BackendRegistry backends = oracle_backends(s);

    const Image canvas = compose_on_background(s.image, s.modal, kGray);
    const BinaryMask region = s.hidden_region();  // exactly the missing pixels
    const Image painted = backends.inpainter->inpaint(canvas, region, "anything");

    // completed object support equals GT: non-gray pixels are object pixels
    BinaryMask support(canvas.height(), canvas.width());
    for (int y = 0; y < canvas.height(); ++y)
        for (int x = 0; x < canvas.width(); ++x)
            if (!(painted.at(y, x) == kGray)) support.set(y, x, true);
    CHECK(support == s.gt_amodal_mask);

    // idempotent and deterministic
    CHECK(backends.inpainter->inpaint(canvas, region, "x") ==
          backends.inpainter->inpaint(canvas, region, "y"));
    CHECK(backends.inpainter->inpaint(painted, region, "x") == painted);
}

TEST_CASE("oracle inpainter clipped by a small region leaves a boundary touch") {
    HandScene scene;
    const SyntheticSample& s = scene.sample;
    BackendRegistry backends = oracle_backends(s);

    // box that cuts through the hidden part at x = 60 (object ends at 70)
    const BBox clipped_box{20, 30, 60, 60};
    const BinaryMask inpaint = mask_subtract(s.occluder_masks[0], s.modal);
    const BinaryMask region = intersect_bbox_mask(clipped_box, inpaint);
    const Image canvas = compose_on_background(s.image, s.modal, kGray);
    const Image painted = backends.inpainter->inpaint(canvas, region, "p");

    BinaryMask support(canvas.height(), canvas.width());
    for (int y = 0; y < canvas.height(); ++y)
        for (int x = 0; x < canvas.width(); ++x)
            if (!(painted.at(y, x) == kGray)) support.set(y, x, true);
    CHECK(touches_boundary(support, clipped_box, 2));
}

TEST_CASE("oracle corner-seeded segmentation returns the exact background complement") {
    HandScene scene;
    const SyntheticSample& s = scene.sample;
    BackendRegistry backends = oracle_backends(s);
    const Image canvas = compose_on_background(s.image, s.modal, kGray);
    const BinaryMask background = backends.segmenter->segment_region(
        canvas, std::vector<PixelPoint>{{0, 0}, {99, 0}, {0, 99}, {99, 99}});
    CHECK(background == mask_invert(s.modal));
}

TEST_CASE("oracle classifier ranks the GT category first") {
    HandScene scene;
    BackendRegistry backends = oracle_backends(scene.sample);
    const Image cutout = compose_on_background(scene.sample.gt_amodal_image,
                                               scene.sample.gt_amodal_mask, kWhite);
    const auto ranked =
        backends.classifier->classify(cutout, {"ellipse", "rectangle", "sprite"});
    REQUIRE_FALSE(ranked.empty());
    CHECK(ranked[0] == "rectangle");
    CHECK(ranked.size() == 3);
    CHECK_THROWS_AS(backends.classifier->classify(scene.sample.image, {"a"}),
                    MalformedResponseError);
}

TEST_CASE("oracle chat script answers the three guidance prompts from GT") {
    HandScene scene;
    const auto script = oracle_chat_script(scene.sample);
    REQUIRE(script.size() == 3);
    CHECK(script[0].response.find("\"requires_extensive_completion\": \"yes\"") !=
          std::string::npos);
    CHECK(script[0].response.find("rectangle") != std::string::npos);
    // boxes: three nested expansions of the GT bbox (20,30,70,60)
    CHECK(script[1].response.find("[16, 26, 74, 64]") != std::string::npos);
    CHECK(script[2].response.find("Prompt:") == 0);
}

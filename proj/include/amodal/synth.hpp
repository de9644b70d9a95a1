#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amodal/backends.hpp"
#include "amodal/image.hpp"
#include "amodal/mask.hpp"
#include "amodal/occluders.hpp"
#include "amodal/scripted.hpp"

namespace amodal {

// SplitMix64 PRNG. Chosen because it is tiny and produces the same stream on
// every platform, which keeps generated fixtures reproducible everywhere.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform in [lo, hi] inclusive.
    int range(int lo, int hi) {
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

enum class ShapeKind { Rect, Ellipse, Sprite };

const char* to_string(ShapeKind k);

struct SceneSpec {
    ShapeKind shape = ShapeKind::Rect;
    int occluder_count = 1;
    double min_occlusion = 0.3;   // achieved ratio lands in [min, max]
    double max_occlusion = 0.8;
    ImageSize canvas{192, 192};
};

// Fully known occluded scene: exact analytic ground truth for every mask, so
// end-to-end pipeline behavior is checkable pixel for pixel.
struct SyntheticSample {
    std::string sample_id;
    Image image;                 // scene with occluders drawn on top
    Image gt_amodal_image;       // same scene without any occluder
    BinaryMask gt_amodal_mask;   // full object support
    BinaryMask modal;            // gt_amodal_mask minus all occluders
    std::vector<BinaryMask> occluder_masks;  // full shapes, in draw order
    double occlusion_ratio = 0.0;
    std::uint64_t seed = 0;
    std::string category;

    // What a scene segmenter would see for occluder k: its shape minus every
    // occluder drawn later.
    std::vector<BinaryMask> visible_occluder_segments() const;
    BinaryMask hidden_region() const { return mask_subtract(gt_amodal_mask, modal); }
};

// Deterministic for (spec, seed). Retries occluder placement with size
// feedback until the achieved occlusion ratio lands in the requested range;
// throws GenerationFailedError if the range is unreachable.
SyntheticSample gen_scene(const SceneSpec& spec, std::uint64_t seed);

struct OracleOptions {
    RGB canvas_gray = kGray;       // must match the pipeline's gray background
    int crop_margin_px = 100;      // visual-prompt params, must mirror the pipeline config
    int stroke_px = 3;
    OccluderParams occluder_params{};
    double requires_threshold = 0.2;  // GT ratio at/above which the chat oracle answers yes
    int tight_margin_px = 4;          // box margins around the GT full-object bbox
    int moderate_margin_px = 10;
    int coarse_margin_px = 18;
};

// Ground-truth-backed test doubles for every backend role, keyed by image
// content so one registry serves a whole batch:
//   segmenter.segment_all    -> target segment, visible occluder segments,
//                               background segment
//   segmenter.segment_region -> all pixels matching the gray canvas color
//   order predictor          -> relations from the known draw order
//   inpainter                -> paints GT object pixels inside region ∩ GT
//                               support, leaves the rest untouched
//   classifier               -> GT category first
//   chat (small and large)   -> decision / boxes / description derived from GT
BackendRegistry oracle_backends(const std::vector<SyntheticSample>& samples,
                                const OracleOptions& options = {});
BackendRegistry oracle_backends(const SyntheticSample& sample, const OracleOptions& options = {});

// The chat answers the oracle would give, as a consumable script for tests
// that exercise the scripted backend directly: decision, geometric boxes,
// semantic description, in that order.
std::vector<ScriptEntry> oracle_chat_script(const SyntheticSample& sample,
                                            const OracleOptions& options = {});

// Directory layout {image.png, modal.png, amodal.png, meta.json} plus the
// extra GT files the oracle backends need (amodal_image.png, occluder_*.png).
void save_sample(const SyntheticSample& sample, const std::filesystem::path& dir);
SyntheticSample load_sample(const std::filesystem::path& dir);

}  // namespace amodal

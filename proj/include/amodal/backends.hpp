#pragma once

#include <memory>
#include <string>
#include <vector>

#include "amodal/bbox.hpp"
#include "amodal/image.hpp"
#include "amodal/mask.hpp"

namespace amodal {

struct DecodeParams {
    int max_tokens = 512;
    double temperature = 0.0;

    friend bool operator==(const DecodeParams&, const DecodeParams&) = default;
};

// One multimodal chat call: system text, user text, one image.
struct ChatVisionRequest {
    std::string system_prompt;
    std::string user_prompt;
    Image image;
    DecodeParams decode;
};

class ChatVisionModel {
public:
    virtual ~ChatVisionModel() = default;
    virtual std::string chat(const ChatVisionRequest& request) = 0;
    virtual std::string id() const = 0;
};

struct PixelPoint {
    int x = 0;
    int y = 0;
};

class Segmenter {
public:
    virtual ~Segmenter() = default;
    // Full-scene segmentation: every salient segment in the image.
    virtual std::vector<BinaryMask> segment_all(const Image& image) = 0;
    // Targeted segmentation of the region indicated by seed points or a box.
    virtual BinaryMask segment_region(const Image& image,
                                      const std::vector<PixelPoint>& seeds) = 0;
    virtual BinaryMask segment_region(const Image& image, const BBox& box) = 0;
};

enum class OrderRelation { None, FirstOccludesSecond, SecondOccludesFirst };

// Pairwise occlusion relations; storage is antisymmetric, so setting (i, j)
// also fixes (j, i).
class OrderMatrix {
public:
    explicit OrderMatrix(int n) : n_(n), rel_(static_cast<std::size_t>(n) * n) {}

    int size() const { return n_; }
    OrderRelation at(int i, int j) const { return rel_[static_cast<std::size_t>(i) * n_ + j]; }
    void set(int i, int j, OrderRelation r) {
        rel_[static_cast<std::size_t>(i) * n_ + j] = r;
        OrderRelation mirror = r;
        if (r == OrderRelation::FirstOccludesSecond) mirror = OrderRelation::SecondOccludesFirst;
        if (r == OrderRelation::SecondOccludesFirst) mirror = OrderRelation::FirstOccludesSecond;
        rel_[static_cast<std::size_t>(j) * n_ + i] = mirror;
    }

private:
    int n_;
    std::vector<OrderRelation> rel_;
};

class OcclusionOrderPredictor {
public:
    virtual ~OcclusionOrderPredictor() = default;
    virtual OrderMatrix predict_order(const Image& image,
                                      const std::vector<BinaryMask>& masks) = 0;
};

class Inpainter {
public:
    virtual ~Inpainter() = default;
    virtual Image inpaint(const Image& image, const BinaryMask& region,
                          const std::string& prompt) = 0;
};

class ImageClassifier {
public:
    virtual ~ImageClassifier() = default;
    // Returns the given labels re-ranked best-first.
    virtual std::vector<std::string> classify(const Image& image,
                                              const std::vector<std::string>& labels) = 0;
};

struct BackendRegistry {
    std::shared_ptr<ChatVisionModel> chat_small;   // guidance decision
    std::shared_ptr<ChatVisionModel> chat_large;   // geometric + semantic guidance
    std::shared_ptr<Segmenter> segmenter;
    std::shared_ptr<OcclusionOrderPredictor> order_predictor;
    std::shared_ptr<Inpainter> inpainter;
    std::shared_ptr<ImageClassifier> classifier;   // only needed for recognition eval

    // Throws ConfigError naming any unbound pipeline role (classifier exempt).
    void require_pipeline_roles() const;
};

// Rejects requests that violate the call contract before any backend work.
void validate_chat_request(const ChatVisionRequest& request);

}  // namespace amodal

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hci/image.hpp"
#include "hci/segmentation.hpp"

namespace hci {

/// Rectangle-difference features inside a square base window. Sub-rectangle
/// layout per kind (white minus black, normalized by scaled window area):
///   TwoRectHorizontal: white = left half,           black = right half
///   TwoRectVertical:   white = top half,            black = bottom half
///   ThreeRect:         white = outer thirds (horizontal), black = middle third
///   FourRect:          white = TL and BR quadrants, black = TR and BL
enum class HaarKind { TwoRectHorizontal, TwoRectVertical, ThreeRect, FourRect };

struct HaarFeature {
    HaarKind kind = HaarKind::TwoRectHorizontal;
    int x = 0, y = 0, w = 0, h = 0;  // within the base window
};

struct Window {
    int x = 0;
    int y = 0;
    double scale = 1.0;
};

/// Feature response on the scaled window. Sub-rectangle units are scaled and
/// rounded once so white and black areas stay equal at every scale; a uniform
/// image therefore always gives 0. Throws std::out_of_range when the scaled
/// feature leaves the image.
double haar_value(const IntegralImage& ii, const HaarFeature& f, const Window& win, int base_window);

/// Decision stump on one Haar feature: predicts the positive class iff
/// polarity * value < polarity * threshold. alpha is the boosting vote weight.
struct WeakClassifier {
    HaarFeature feature;
    double threshold = 0.0;
    int polarity = 1;
    double alpha = 0.0;
};

struct Stage {
    std::vector<WeakClassifier> weak;
    double threshold = 0.0;  // stage passes iff sum(alpha * h) >= threshold
};

struct Cascade {
    int base_window = 24;
    std::vector<Stage> stages;
};

struct LabeledWindow {
    GrayImage image;  // base_window x base_window
    int label = 1;    // +1 positive, -1 negative
};

/// Deterministic feature pool: kinds in declaration order, then y, x, h, w
/// ascending with the given strides. Strides trade pool size for accuracy.
std::vector<HaarFeature> enumerate_features(int base_window, int pos_step = 2, int size_step = 2);

/// Freund-Schapire AdaBoost over decision stumps. Sample weights renormalize
/// to 1 every round; each round keeps the first feature (in pool order)
/// reaching the minimal weighted error. Halts early when no stump beats
/// weighted error 0.5. Deterministic for a fixed pool and sample order.
std::vector<WeakClassifier> train_adaboost(const std::vector<LabeledWindow>& samples, int rounds,
                                           const std::vector<HaarFeature>& pool, int base_window);

/// Single boosted stage at threshold 0 wrapped as a cascade.
Cascade train_cascade(const std::vector<LabeledWindow>& samples, int rounds, int base_window = 24,
                      int pos_step = 2, int size_step = 2);

/// All stages evaluated with short-circuit; returns the final-stage margin in
/// `score` (the sum of the last stage evaluated minus its threshold).
bool evaluate_window(const Cascade& cascade, const IntegralImage& ii, const Window& win, double* score = nullptr);

struct Detection {
    int x = 0, y = 0, w = 0, h = 0;
    double score = 0.0;
};

double iou(const Detection& a, const Detection& b);

struct DetectParams {
    double scale_factor = 1.25;
    int stride = 2;           // scaled with the window
    double merge_iou = 0.3;   // greedy overlap merge
};

/// Sliding-window scan over all scales with greedy highest-score overlap
/// merging. Throws std::invalid_argument when the image is smaller than the
/// base window.
std::vector<Detection> detect(const GrayImage& gray, const Cascade& cascade, const DetectParams& params = {});
std::vector<Detection> detect(const Frame& frame, const Cascade& cascade, const DetectParams& params = {});

struct FaceHand {
    Component face;
    Component hand;
    double face_score = 0.0;
};

/// Each candidate bbox is resized to the base window and scored by the
/// cascade. The higher-scoring passing candidate becomes the face; exact ties
/// go to the larger area, then to `a`. Empty when neither passes the final
/// stage (face not verified; pipeline stays in Stage 1).
std::optional<FaceHand> pick_face(const Component& a, const Component& b, const GrayImage& gray,
                                  const Cascade& cascade);

/// Line-oriented text serialization (format documented in the README).
void save_cascade(const Cascade& cascade, const std::string& path);
Cascade load_cascade(const std::string& path);

}  // namespace hci

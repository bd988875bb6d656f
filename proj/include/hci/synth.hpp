#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hci/haar.hpp"
#include "hci/image.hpp"

namespace hci {

inline constexpr int kGestureClasses = 5;
inline constexpr int kIdentityCount = 5;
inline constexpr int kGestureCanvas = 96;

/// One randomized silhouette instance of gesture class 1..5 (palm disk plus a
/// class-specific protrusion pattern) with rotation up to +/-10 degrees, scale
/// +/-20% and low-frequency boundary jitter.
BinaryMask render_gesture(int gesture_class, std::uint64_t seed, int canvas = kGestureCanvas);

struct GestureDataset {
    std::vector<BinaryMask> masks;
    std::vector<int> labels;  // 1..5, per_class of each, interleaved round-robin
};

GestureDataset synth_gestures(int per_class, std::uint64_t seed);

/// Face pattern parameters; five fixed identities vary these.
struct FaceSpec {
    double eye_row = 0.34;    // band top, fraction of the side
    double band_h = 0.13;     // band height fraction
    double eye_gap = 0.12;    // bright gap between the eyes, fraction (0 = one bar)
    double oval_aspect = 0.84;  // semi-x = aspect * semi-y
    double mouth_row = 0.72;  // mouth top fraction
};

FaceSpec identity_spec(int identity);  // 1..kIdentityCount

inline constexpr Rgb kSkinBase{180, 120, 90};   // YCbCr (135, 103, 160)
inline constexpr Rgb kSceneBg{90, 110, 140};    // outside the skin chroma box

/// Square color canvas: background plus a skin-toned oval whose luma encodes
/// the face structure (bright cheeks, dark eye band, mouth line). shift/scale
/// jitter perturb the oval placement the way detection boxes do.
Frame render_face_canvas(const FaceSpec& spec, int side, std::uint64_t seed, Rgb bg,
                         double shift_jitter = 0.0, double scale_jitter = 0.0, double noise_sigma = 4.0);

/// Grayscale training patch for the cascade; randomize_bg varies the
/// background level so the boosting keys on the face structure.
GrayImage render_face_patch(const FaceSpec& spec, int side, std::uint64_t seed, bool randomize_bg);

/// Positives: the five identities with jitter. Negatives: flat skin-toned
/// blobs (hand-like), plain ovals without an eye band, noise, gradients and
/// background crops.
std::vector<LabeledWindow> synth_cascade_samples(int positives, int negatives, std::uint64_t seed,
                                                 int window = 24);

/// (identity, 32x32 gray patch) pairs rendered with detection-style jitter,
/// for PCA fitting and gallery construction.
std::vector<std::pair<int, GrayImage>> synth_identity_faces(int per_identity, std::uint64_t seed,
                                                            int side = 32);

/// Gallery patches cropped by the actual detector from scene-style renders,
/// so the gallery sees exactly the box quantization the pipeline produces.
std::vector<std::pair<int, GrayImage>> synth_identity_faces(int per_identity, std::uint64_t seed, int side,
                                                            const Cascade& cascade);

/// Detection benchmark frame: one jittered face pasted at a random place and
/// scale over matching background noise.
struct PlacedFace {
    GrayImage image;
    Detection truth;
};
PlacedFace synth_detection_frame(std::uint64_t seed, int frame_side = 120);

struct SceneSpec {
    int width = 192, height = 144;
    int gesture_class = 1;
    int identity = 1;
    double face_cx = 50.0, face_cy = 52.0;
    int face_side = 44;      // canvas side; oval semi-axes are fractions of it
    int hand_size = 34;      // silhouette box side in the scene
    double noise_sigma = 4.0;
    std::vector<std::pair<double, double>> hand_path;  // hand box centers per frame
    int arrival_frame = 0;   // first frame the hand rests at the hold point
    std::uint64_t seed = 1;
};

struct SceneFrames {
    std::vector<Frame> frames;
    std::vector<std::pair<double, double>> hand_centers;  // silhouette centroid per frame
    double face_cx = 0, face_cy = 0;
    double face_w = 0, face_h = 0;  // oval bbox
    int gesture_class = 0;
    int identity = 0;
    int arrival_frame = 0;
};

SceneFrames render_scene(const SceneSpec& spec);

/// Scripted approach-then-hold episode: the hand flies in from the right,
/// dashes toward a hold point near the face, and holds the gesture there.
SceneSpec make_episode_spec(int gesture_class, int identity, std::uint64_t seed);

/// Ten-frame variant with the hand already at the hold point.
SceneSpec make_smoke_spec(int gesture_class, int identity, std::uint64_t seed);

}  // namespace hci

#pragma once

#include <array>
#include <vector>

#include "hci/image.hpp"
#include "hci/segmentation.hpp"

namespace hci {

inline constexpr int kGestureSize = 100;        // side of the normalized silhouette
inline constexpr int kHullFeatureCount = 6;     // 3 angles + 3 distances
inline constexpr int kFourierCount = 11;        // retained descriptor magnitudes
inline constexpr int kGestureFeatureDim = kHullFeatureCount + kFourierCount;  // 17

struct PointI {
    int x = 0, y = 0;
    bool operator==(const PointI&) const = default;
};

/// Closed boundary, consecutive points 8-adjacent, oriented so the shoelace
/// signed area over the stored (x, y) coordinates is non-negative.
using Contour = std::vector<PointI>;

using GestureFeatureVector = std::array<double, kGestureFeatureDim>;

/// Crop `mask` restricted to `roi` down to the tight bounding box of its
/// foreground, then nearest-neighbor rescale (non-uniform) to 100x100.
/// Throws std::invalid_argument when the roi holds no foreground.
BinaryMask normalize_gesture(const BinaryMask& mask, const Component& roi);
BinaryMask normalize_gesture(const BinaryMask& mask);  // roi = whole mask

/// Moore boundary trace of the largest 8-connected component, starting at its
/// topmost-leftmost pixel.
Contour trace_contour(const BinaryMask& gesture);

/// Strict convex hull (Graham scan): collinear boundary points dropped,
/// counter-clockwise per the Contour orientation convention. Degenerate inputs
/// give 1 or 2 vertices.
std::vector<PointI> convex_hull(std::vector<PointI> points);

/// Six values from the four hull vertices farthest from the hull vertex mean
/// (descending distance, ties by hull order): the angle to horizontal in
/// [0, 180) and the Euclidean length of the pairs (b1,b2), (b2,b3), (b3,b4) --
/// 3 angles then 3 distances. Hulls with fewer than 4 vertices are padded by
/// repeating the last vertex.
std::array<double, kHullFeatureCount> hull_features(const std::vector<PointI>& hull);

/// Normalized Fourier descriptors of the complex boundary sequence
/// p(l) = x(l) + j*y(l): with z(k) = (1/n) * sum_l p(l) * exp(-j*2*pi*l*k/n),
/// returns |z(k)| / |z(1)| for k = 1..m. Dropping z(0) removes translation,
/// dividing by |z(1)| removes scale, taking magnitudes removes rotation and
/// start-point dependence; the first value is always 1.
/// Requires contour length n > m; throws when |z(1)| < 1e-12.
std::vector<double> fourier_descriptors(const Contour& contour, int m);

/// hull_features ++ fourier_descriptors(m = 11) over the normalized silhouette.
GestureFeatureVector gesture_vector(const BinaryMask& gesture);

}  // namespace hci

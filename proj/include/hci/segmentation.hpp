#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hci/image.hpp"

namespace hci {

/// Chroma-box skin classifier in full-range YCbCr. A pixel is skin iff Cb and
/// Cr fall inside the configured intervals and Y >= y_min.
struct SkinRule {
    std::uint8_t cb_lo = 77, cb_hi = 127;
    std::uint8_t cr_lo = 133, cr_hi = 173;
    std::uint8_t y_min = 0;

    bool valid() const { return cb_lo <= cb_hi && cr_lo <= cr_hi; }
};

struct Component {
    std::int32_t label = 0;   // discovery order, starting at 1
    std::int64_t area = 0;    // pixel count
    int x = 0, y = 0, w = 0, h = 0;  // bounding box
    double cx = 0.0, cy = 0.0;       // centroid, sub-pixel
};

BinaryMask skin_mask(const Frame& frame, const SkinRule& rule);

/// Morphology with a disk structuring element {(dx,dy) : dx^2+dy^2 <= r^2}.
/// Pixels beyond the image border count as background, so erosion eats inward
/// from the border.
BinaryMask erode(const BinaryMask& mask, int radius);
BinaryMask dilate(const BinaryMask& mask, int radius);

/// Background regions (4-connectivity) not reachable from the image border
/// become foreground.
BinaryMask fill_holes(const BinaryMask& mask);

/// 8-connected components, sorted by area descending, ties by bbox (y, x)
/// ascending. `label_map` (optional) receives per-pixel labels, 0 = background.
std::vector<Component> label_components(const BinaryMask& mask, std::vector<std::int32_t>* label_map = nullptr);

/// The two largest components with area >= min_area; ties by smaller bbox
/// (y, then x). Empty when fewer than two survive (pipeline stays in Stage 1).
std::optional<std::pair<Component, Component>> select_candidates(const std::vector<Component>& components,
                                                                 std::int64_t min_area);

}  // namespace hci

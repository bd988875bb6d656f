#include "hci/segmentation.hpp"

#include <algorithm>
#include <stdexcept>

namespace hci {

BinaryMask skin_mask(const Frame& frame, const SkinRule& rule) {
    if (!rule.valid()) throw std::invalid_argument("skin_mask: rule intervals must satisfy lo <= hi");
    const YCbCrPlanes p = rgb_to_ycbcr(frame);
    BinaryMask out(frame.width, frame.height);
    for (std::size_t i = 0; i < out.bits.size(); ++i) {
        out.bits[i] = (p.cb[i] >= rule.cb_lo && p.cb[i] <= rule.cb_hi && p.cr[i] >= rule.cr_lo &&
                       p.cr[i] <= rule.cr_hi && p.y[i] >= rule.y_min)
                          ? 1
                          : 0;
    }
    return out;
}

namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius) {
    if (radius < 1) throw std::invalid_argument("morphology: radius must be >= 1");
    std::vector<std::pair<int, int>> offs;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offs.emplace_back(dx, dy);
    return offs;
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, int radius) {
    const auto offs = disk_offsets(radius);
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            bool keep = true;
            for (auto [dx, dy] : offs) {
                const int nx = x + dx, ny = y + dy;
                if (!mask.in_bounds(nx, ny) || !mask.get(nx, ny)) {
                    keep = false;
                    break;
                }
            }
            out.set(x, y, keep);
        }
    }
    return out;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
    const auto offs = disk_offsets(radius);
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            for (auto [dx, dy] : offs) {
                const int nx = x + dx, ny = y + dy;
                if (mask.in_bounds(nx, ny)) out.set(nx, ny, true);
            }
        }
    }
    return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<std::uint8_t> border_bg(std::size_t(w) * h, 0);
    std::vector<std::pair<int, int>> stack;
    auto push = [&](int x, int y) {
        const std::size_t i = std::size_t(y) * w + x;
        if (!mask.bits[i] && !border_bg[i]) {
            border_bg[i] = 1;
            stack.emplace_back(x, y);
        }
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        if (x > 0) push(x - 1, y);
        if (x + 1 < w) push(x + 1, y);
        if (y > 0) push(x, y - 1);
        if (y + 1 < h) push(x, y + 1);
    }
    BinaryMask out(w, h);
    for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = border_bg[i] ? 0 : 1;
    return out;
}

std::vector<Component> label_components(const BinaryMask& mask, std::vector<std::int32_t>* label_map) {
    const int w = mask.width, h = mask.height;
    std::vector<std::int32_t> labels(std::size_t(w) * h, 0);
    std::vector<Component> comps;
    std::vector<std::pair<int, int>> stack;
    std::int32_t next = 1;

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            const std::size_t si = std::size_t(sy) * w + sx;
            if (!mask.bits[si] || labels[si]) continue;
            Component c;
            c.label = next++;
            int min_x = sx, max_x = sx, min_y = sy, max_y = sy;
            double sum_x = 0, sum_y = 0;
            labels[si] = c.label;
            stack.emplace_back(sx, sy);
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                ++c.area;
                sum_x += x;
                sum_y += y;
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        const std::size_t ni = std::size_t(ny) * w + nx;
                        if (mask.bits[ni] && !labels[ni]) {
                            labels[ni] = c.label;
                            stack.emplace_back(nx, ny);
                        }
                    }
                }
            }
            c.x = min_x;
            c.y = min_y;
            c.w = max_x - min_x + 1;
            c.h = max_y - min_y + 1;
            c.cx = sum_x / static_cast<double>(c.area);
            c.cy = sum_y / static_cast<double>(c.area);
            comps.push_back(c);
        }
    }
    std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        if (a.area != b.area) return a.area > b.area;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    if (label_map) *label_map = std::move(labels);
    return comps;
}

std::optional<std::pair<Component, Component>> select_candidates(const std::vector<Component>& components,
                                                                 std::int64_t min_area) {
    std::vector<Component> surviving;
    for (const Component& c : components)
        if (c.area >= min_area) surviving.push_back(c);
    if (surviving.size() < 2) return std::nullopt;
    std::sort(surviving.begin(), surviving.end(), [](const Component& a, const Component& b) {
        if (a.area != b.area) return a.area > b.area;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    return std::make_pair(surviving[0], surviving[1]);
}

}  // namespace hci

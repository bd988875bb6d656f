#include "hci/gesture.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace hci {

namespace {

// Tight foreground bounding box within [x0,x1) x [y0,y1); false when empty.
bool tight_bbox(const BinaryMask& mask, int x0, int y0, int x1, int y1, int& bx, int& by, int& bw, int& bh) {
    int min_x = x1, max_x = x0 - 1, min_y = y1, max_y = y0 - 1;
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            if (mask.get(x, y)) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    if (max_x < min_x) return false;
    bx = min_x;
    by = min_y;
    bw = max_x - min_x + 1;
    bh = max_y - min_y + 1;
    return true;
}

}  // namespace

BinaryMask normalize_gesture(const BinaryMask& mask, const Component& roi) {
    const int x0 = std::max(0, roi.x), y0 = std::max(0, roi.y);
    const int x1 = std::min(mask.width, roi.x + roi.w), y1 = std::min(mask.height, roi.y + roi.h);
    int bx, by, bw, bh;
    if (x0 >= x1 || y0 >= y1 || !tight_bbox(mask, x0, y0, x1, y1, bx, by, bw, bh))
        throw std::invalid_argument("normalize_gesture: no foreground in roi");
    return resize_nearest(crop(mask, bx, by, bw, bh), kGestureSize, kGestureSize);
}

BinaryMask normalize_gesture(const BinaryMask& mask) {
    Component all;
    all.x = 0;
    all.y = 0;
    all.w = mask.width;
    all.h = mask.height;
    return normalize_gesture(mask, all);
}

Contour trace_contour(const BinaryMask& gesture) {
    std::vector<std::int32_t> labels;
    const auto comps = label_components(gesture, &labels);
    if (comps.empty()) throw std::invalid_argument("trace_contour: empty mask");
    const std::int32_t target = comps[0].label;
    const int w = gesture.width, h = gesture.height;
    auto fg = [&](int x, int y) {
        return x >= 0 && x < w && y >= 0 && y < h && labels[std::size_t(y) * w + x] == target;
    };

    // topmost-leftmost pixel of the largest component
    PointI start{-1, -1};
    for (int y = 0; y < h && start.x < 0; ++y)
        for (int x = 0; x < w; ++x)
            if (fg(x, y)) {
                start = {x, y};
                break;
            }

    // Moore neighborhood, clockwise in image coordinates (y down); the scan
    // order guarantees everything west and north of `start` is background.
    static constexpr int dx8[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static constexpr int dy8[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    auto dir_of = [&](PointI from, PointI to) {
        for (int d = 0; d < 8; ++d)
            if (from.x + dx8[d] == to.x && from.y + dy8[d] == to.y) return d;
        return -1;
    };

    Contour contour{start};
    PointI p = start;
    PointI backtrack{start.x - 1, start.y};
    const PointI b0 = backtrack;
    const std::size_t step_cap = 4 * std::size_t(w) * h + 8;
    for (std::size_t step = 0; step < step_cap; ++step) {
        const int bdir = dir_of(p, backtrack);
        int found = -1;
        PointI prev_checked = backtrack;
        for (int i = 1; i <= 8; ++i) {
            const int d = (bdir + i) % 8;
            const PointI q{p.x + dx8[d], p.y + dy8[d]};
            if (fg(q.x, q.y)) {
                found = d;
                backtrack = prev_checked;
                p = q;
                break;
            }
            prev_checked = q;
        }
        if (found < 0) break;  // isolated pixel
        if (p == start && backtrack == b0) break;  // full cycle (Jacob's criterion)
        contour.push_back(p);
    }
    return contour;
}

namespace {

std::int64_t cross(const PointI& o, const PointI& a, const PointI& b) {
    return std::int64_t(a.x - o.x) * (b.y - o.y) - std::int64_t(a.y - o.y) * (b.x - o.x);
}

std::int64_t dist2(const PointI& a, const PointI& b) {
    const std::int64_t dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

}  // namespace

std::vector<PointI> convex_hull(std::vector<PointI> points) {
    if (points.empty()) throw std::invalid_argument("convex_hull: no points");
    std::sort(points.begin(), points.end(), [](const PointI& a, const PointI& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() <= 2) return points;

    const auto pivot_it = std::min_element(points.begin(), points.end(), [](const PointI& a, const PointI& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    std::swap(*points.begin(), *pivot_it);
    const PointI pivot = points[0];
    std::sort(points.begin() + 1, points.end(), [&](const PointI& a, const PointI& b) {
        const std::int64_t c = cross(pivot, a, b);
        if (c != 0) return c > 0;
        return dist2(pivot, a) < dist2(pivot, b);
    });

    std::vector<PointI> hull;
    for (const PointI& p : points) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
        hull.push_back(p);
    }
    // closure pass: drop vertices collinear with their cyclic neighbors
    bool changed = hull.size() >= 3;
    while (changed && hull.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const PointI& a = hull[(i + hull.size() - 1) % hull.size()];
            const PointI& c = hull[(i + 1) % hull.size()];
            if (cross(a, hull[i], c) <= 0) {
                hull.erase(hull.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return hull;
}

std::array<double, kHullFeatureCount> hull_features(const std::vector<PointI>& hull) {
    if (hull.empty()) throw std::invalid_argument("hull_features: empty hull");
    std::vector<PointI> verts = hull;
    while (verts.size() < 4) verts.push_back(verts.back());

    double mx = 0, my = 0;
    for (const PointI& p : verts) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(verts.size());
    my /= static_cast<double>(verts.size());

    std::vector<std::size_t> order(verts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = (verts[a].x - mx) * (verts[a].x - mx) + (verts[a].y - my) * (verts[a].y - my);
        const double db = (verts[b].x - mx) * (verts[b].x - mx) + (verts[b].y - my) * (verts[b].y - my);
        return da > db;
    });

    std::array<PointI, 4> b{verts[order[0]], verts[order[1]], verts[order[2]], verts[order[3]]};
    std::array<double, kHullFeatureCount> out{};
    for (int i = 0; i < 3; ++i) {
        const double dx = b[i + 1].x - b[i].x;
        const double dy = b[i + 1].y - b[i].y;
        double ang = std::atan2(dy, dx) * 180.0 / 3.14159265358979323846;
        if (ang < 0) ang += 180.0;
        if (ang >= 180.0) ang -= 180.0;
        out[static_cast<std::size_t>(i)] = ang;
        out[static_cast<std::size_t>(i) + 3] = std::sqrt(dx * dx + dy * dy);
    }
    return out;
}

std::vector<double> fourier_descriptors(const Contour& contour, int m) {
    const std::size_t n = contour.size();
    if (m < 1) throw std::invalid_argument("fourier_descriptors: m must be >= 1");
    if (n <= static_cast<std::size_t>(m))
        throw std::invalid_argument("fourier_descriptors: contour length must exceed m");

    const double two_pi = 6.283185307179586476925286766559;
    std::vector<double> mags(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) {
        std::complex<double> z(0.0, 0.0);
        for (std::size_t l = 0; l < n; ++l) {
            const double phase = -two_pi * static_cast<double>(l) * k / static_cast<double>(n);
            z += std::complex<double>(contour[l].x, contour[l].y) *
                 std::complex<double>(std::cos(phase), std::sin(phase));
        }
        mags[static_cast<std::size_t>(k - 1)] = std::abs(z) / static_cast<double>(n);
    }
    if (mags[0] < 1e-12) throw std::domain_error("fourier_descriptors: |z(1)| below 1e-12, degenerate contour");
    const double scale = mags[0];
    for (double& v : mags) v /= scale;
    return mags;
}

GestureFeatureVector gesture_vector(const BinaryMask& gesture) {
    if (gesture.width != kGestureSize || gesture.height != kGestureSize)
        throw std::invalid_argument("gesture_vector: expected a 100x100 normalized gesture");
    const Contour contour = trace_contour(gesture);
    const auto hull = convex_hull(contour);
    const auto hf = hull_features(hull);
    const auto fd = fourier_descriptors(contour, kFourierCount);
    GestureFeatureVector v{};
    for (int i = 0; i < kHullFeatureCount; ++i) v[static_cast<std::size_t>(i)] = hf[static_cast<std::size_t>(i)];
    for (int i = 0; i < kFourierCount; ++i)
        v[static_cast<std::size_t>(kHullFeatureCount + i)] = fd[static_cast<std::size_t>(i)];
    return v;
}

}  // namespace hci

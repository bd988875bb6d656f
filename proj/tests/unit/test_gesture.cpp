#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>

#include "hci/gesture.hpp"
#include "hci/rng.hpp"

using namespace hci;

namespace {

std::int64_t cross_i(PointI o, PointI a, PointI b) {
    return std::int64_t(a.x - o.x) * (b.y - o.y) - std::int64_t(a.y - o.y) * (b.x - o.x);
}

bool strictly_between(PointI p, PointI a, PointI b) {
    if (cross_i(a, b, p) != 0) return false;
    const std::int64_t dot = std::int64_t(p.x - a.x) * (b.x - a.x) + std::int64_t(p.y - a.y) * (b.y - a.y);
    const std::int64_t len2 = std::int64_t(b.x - a.x) * (b.x - a.x) + std::int64_t(b.y - a.y) * (b.y - a.y);
    return dot > 0 && dot < len2;
}

bool strictly_inside_triangle(PointI p, PointI a, PointI b, PointI c) {
    const std::int64_t d1 = cross_i(a, b, p);
    const std::int64_t d2 = cross_i(b, c, p);
    const std::int64_t d3 = cross_i(c, a, p);
    return (d1 > 0 && d2 > 0 && d3 > 0) || (d1 < 0 && d2 < 0 && d3 < 0);
}

// Brute force: p is a strict hull vertex iff it is neither strictly between two
// other points nor strictly inside any triangle of other points.
std::vector<PointI> hull_vertices_oracle(std::vector<PointI> pts) {
    std::sort(pts.begin(), pts.end(), [](PointI a, PointI b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<PointI> verts;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::vector<PointI> others;
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (j != i) others.push_back(pts[j]);
        bool vertex = true;
        for (std::size_t a = 0; a < others.size() && vertex; ++a)
            for (std::size_t b = a + 1; b < others.size() && vertex; ++b)
                if (strictly_between(pts[i], others[a], others[b])) vertex = false;
        for (std::size_t a = 0; a < others.size() && vertex; ++a)
            for (std::size_t b = a + 1; b < others.size() && vertex; ++b)
                for (std::size_t c = b + 1; c < others.size() && vertex; ++c)
                    if (strictly_inside_triangle(pts[i], others[a], others[b], others[c])) vertex = false;
        if (vertex) verts.push_back(pts[i]);
    }
    return verts;
}

std::vector<PointI> sorted_points(std::vector<PointI> v) {
    std::sort(v.begin(), v.end(), [](PointI a, PointI b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    return v;
}

// Naive full DFT of the complex boundary sequence, normalized like the library.
std::vector<double> dft_descriptor_oracle(const Contour& c, int m) {
    const std::size_t n = c.size();
    std::vector<std::complex<double>> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0, 0);
        for (std::size_t l = 0; l < n; ++l) {
            const double ph = -2.0 * M_PI * double(l) * double(k) / double(n);
            acc += std::complex<double>(c[l].x, c[l].y) * std::exp(std::complex<double>(0, ph));
        }
        z[k] = acc / double(n);
    }
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) out[std::size_t(k - 1)] = std::abs(z[std::size_t(k)]) / std::abs(z[1]);
    return out;
}

Contour random_closed_walk(Rng& rng, int n) {
    Contour c;
    int x = 200, y = 200;
    for (int i = 0; i < n; ++i) {
        c.push_back({x, y});
        x += rng.uniform_int(-3, 3);
        y += rng.uniform_int(-3, 3);
    }
    return c;
}

Contour digital_circle(int cx, int cy, double r, int n) {
    Contour c;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * i / n;
        c.push_back({cx + int(std::lround(r * std::cos(t))), cy + int(std::lround(r * std::sin(t)))});
    }
    return c;
}

}  // namespace

TEST_SUITE("gesture") {

TEST_CASE("normalize_gesture: output is always 100x100") {
    BinaryMask m(37, 61);
    m.set(10, 20, true);
    m.set(30, 50, true);
    BinaryMask g = normalize_gesture(m);
    CHECK(g.width == 100);
    CHECK(g.height == 100);
    CHECK(g.count() >= 1);
}

TEST_CASE("normalize_gesture: tight 100x100 input is unchanged") {
    Rng rng(5);
    BinaryMask m(100, 100);
    // corners set so the tight bbox is the full image
    m.set(0, 0, true);
    m.set(99, 99, true);
    for (int i = 0; i < 500; ++i)
        m.set(rng.uniform_int(0, 99), rng.uniform_int(0, 99), true);
    CHECK(normalize_gesture(m) == m);
}

TEST_CASE("normalize_gesture: 50x200 solid rectangle becomes a solid square") {
    BinaryMask m(60, 210);
    for (int y = 5; y < 205; ++y)
        for (int x = 5; x < 55; ++x) m.set(x, y, true);
    BinaryMask g = normalize_gesture(m);
    CHECK(g.count() == 100 * 100);
}

TEST_CASE("normalize_gesture: empty roi is an error") {
    BinaryMask m(10, 10);
    CHECK_THROWS_AS(normalize_gesture(m), std::invalid_argument);
}

TEST_CASE("trace_contour: single foreground pixel gives a 1-point contour") {
    BinaryMask m(5, 5);
    m.set(2, 2, true);
    Contour c = trace_contour(m);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == PointI{2, 2});
}

TEST_CASE("trace_contour: filled 3x3 square walks the 8 border pixels") {
    BinaryMask m(5, 5);
    for (int y = 1; y <= 3; ++y)
        for (int x = 1; x <= 3; ++x) m.set(x, y, true);
    Contour c = trace_contour(m);
    const Contour expected{{1, 1}, {2, 1}, {3, 1}, {3, 2}, {3, 3}, {2, 3}, {1, 3}, {1, 2}};
    CHECK(c == expected);

    // orientation convention: shoelace signed area non-negative
    std::int64_t twice_area = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const PointI& a = c[i];
        const PointI& b = c[(i + 1) % c.size()];
        twice_area += std::int64_t(a.x) * b.y - std::int64_t(b.x) * a.y;
    }
    CHECK(twice_area >= 0);
}

TEST_CASE("trace_contour: every point touches background or the border") {
    Rng rng(41);
    BinaryMask m(30, 30);
    for (int i = 0; i < 260; ++i) m.set(rng.uniform_int(2, 27), rng.uniform_int(2, 27), true);
    Contour c = trace_contour(m);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const PointI& p = c[i];
        bool boundary = p.x == 0 || p.y == 0 || p.x == m.width - 1 || p.y == m.height - 1;
        const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
        for (int k = 0; k < 4 && !boundary; ++k)
            if (!m.get(p.x + dx4[k], p.y + dy4[k])) boundary = true;
        CHECK(boundary);
        // consecutive points 8-adjacent, closed cycle
        const PointI& q = c[(i + 1) % c.size()];
        CHECK(std::max(std::abs(p.x - q.x), std::abs(p.y - q.y)) <= 1);
    }
}

TEST_CASE("convex_hull: square corners win over the center point") {
    auto hull = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}});
    CHECK(sorted_points(hull) == std::vector<PointI>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("convex_hull: collinear input collapses to the two extremes") {
    auto hull = convex_hull({{0, 0}, {2, 2}, {4, 4}, {6, 6}, {3, 3}});
    CHECK(sorted_points(hull) == std::vector<PointI>{{0, 0}, {6, 6}});
}

TEST_CASE("convex_hull: matches the brute-force oracle on random sets") {
    Rng rng(43);
    for (int t = 0; t < 200; ++t) {
        const int n = 3 + static_cast<int>(rng.below(48));
        std::vector<PointI> pts;
        for (int i = 0; i < n; ++i) pts.push_back({rng.uniform_int(0, 100), rng.uniform_int(0, 100)});
        auto hull = convex_hull(pts);
        CHECK(sorted_points(hull) == sorted_points(hull_vertices_oracle(pts)));

        // counter-clockwise and strictly convex
        if (hull.size() >= 3) {
            for (std::size_t i = 0; i < hull.size(); ++i) {
                const PointI& a = hull[i];
                const PointI& b = hull[(i + 1) % hull.size()];
                const PointI& c = hull[(i + 2) % hull.size()];
                CHECK(cross_i(a, b, c) > 0);
            }
        }
    }
}

TEST_CASE("hull_features: axis-aligned rectangle with equidistant corners") {
    // all corners tie in centroid distance, so selection order follows hull order
    const std::vector<PointI> hull{{0, 0}, {5, 0}, {5, 7}, {0, 7}};
    auto f = hull_features(hull);
    CHECK(f[0] == doctest::Approx(0.0));   // (0,0)->(5,0)
    CHECK(f[1] == doctest::Approx(90.0));  // (5,0)->(5,7)
    CHECK(f[2] == doctest::Approx(0.0));   // (5,7)->(0,7), the 180 line folds to 0
    CHECK(f[3] == doctest::Approx(5.0));
    CHECK(f[4] == doctest::Approx(7.0));
    CHECK(f[5] == doctest::Approx(5.0));
}

TEST_CASE("hull_features: 3-4-5 pair angle and degenerate padding") {
    auto f = hull_features({{0, 0}, {3, 4}});
    CHECK(f[0] == doctest::Approx(std::atan2(4.0, 3.0) * 180.0 / M_PI));  // 53.130
    CHECK(f[3] == doctest::Approx(5.0));
    // padded pairs are degenerate
    CHECK(f[1] == doctest::Approx(0.0));
    CHECK(f[4] == doctest::Approx(0.0));
    CHECK(f[2] == doctest::Approx(0.0));
    CHECK(f[5] == doctest::Approx(0.0));
}

TEST_CASE("hull_features: angles in [0,180), distances non-negative") {
    Rng rng(47);
    for (int t = 0; t < 100; ++t) {
        std::vector<PointI> pts;
        for (int i = 0; i < 12; ++i) pts.push_back({rng.uniform_int(0, 99), rng.uniform_int(0, 99)});
        auto f = hull_features(convex_hull(pts));
        for (int i = 0; i < 3; ++i) {
            CHECK(f[std::size_t(i)] >= 0.0);
            CHECK(f[std::size_t(i)] < 180.0);
            CHECK(f[std::size_t(i) + 3] >= 0.0);
        }
    }
}

TEST_CASE("fourier: first descriptor is exactly 1 for valid contours") {
    Rng rng(53);
    for (int t = 0; t < 50; ++t) {
        Contour c = random_closed_walk(rng, 20 + static_cast<int>(rng.below(200)));
        auto d = fourier_descriptors(c, 11);
        CHECK(d[0] == 1.0);
    }
}

TEST_CASE("fourier: digital circle concentrates energy in the first harmonic") {
    Contour c = digital_circle(50, 50, 30.0, 64);
    auto d = fourier_descriptors(c, 11);
    CHECK(d[0] == 1.0);
    for (std::size_t k = 1; k < d.size(); ++k) CHECK(d[k] <= 0.05);
}

TEST_CASE("fourier: start-point shift leaves descriptors unchanged") {
    Rng rng(59);
    Contour c = random_closed_walk(rng, 120);
    auto base = fourier_descriptors(c, 11);
    for (int shift : {1, 17, 63}) {
        Contour rotated(c.begin() + shift, c.end());
        rotated.insert(rotated.end(), c.begin(), c.begin() + shift);
        auto d = fourier_descriptors(rotated, 11);
        for (std::size_t k = 0; k < d.size(); ++k) CHECK(d[k] == doctest::Approx(base[k]).epsilon(1e-9));
    }
}

TEST_CASE("fourier: translation and uniform scale invariance") {
    Rng rng(61);
    Contour c = random_closed_walk(rng, 100);
    auto base = fourier_descriptors(c, 11);

    Contour shifted = c;
    for (auto& p : shifted) {
        p.x += 37;
        p.y -= 12;
    }
    auto d1 = fourier_descriptors(shifted, 11);
    for (std::size_t k = 0; k < d1.size(); ++k) CHECK(d1[k] == doctest::Approx(base[k]).epsilon(1e-9));

    Contour scaled = c;
    for (auto& p : scaled) {
        p.x *= 3;
        p.y *= 3;
    }
    auto d2 = fourier_descriptors(scaled, 11);
    for (std::size_t k = 0; k < d2.size(); ++k) CHECK(d2[k] == doctest::Approx(base[k]).epsilon(1e-9));
}

TEST_CASE("fourier: matches the naive DFT oracle") {
    Rng rng(67);
    for (int t = 0; t < 20; ++t) {
        Contour c = random_closed_walk(rng, 20 + static_cast<int>(rng.below(236)));
        auto lib = fourier_descriptors(c, 11);
        auto oracle = dft_descriptor_oracle(c, 11);
        for (std::size_t k = 0; k < lib.size(); ++k) CHECK(lib[k] == doctest::Approx(oracle[k]).epsilon(1e-9));
    }
}

TEST_CASE("fourier: contour shorter than m+1 and degenerate contours are errors") {
    Contour tiny{{0, 0}, {1, 0}, {1, 1}};
    CHECK_THROWS_AS(fourier_descriptors(tiny, 11), std::invalid_argument);
    Contour constant(20, PointI{5, 5});
    CHECK_THROWS_AS(fourier_descriptors(constant, 11), std::domain_error);
}

TEST_CASE("gesture_vector: 17 finite values, deterministic") {
    BinaryMask m(40, 40);
    for (int y = 10; y < 30; ++y)
        for (int x = 8; x < 33; ++x) m.set(x, y, true);
    for (int y = 2; y < 10; ++y)
        for (int x = 18; x < 23; ++x) m.set(x, y, true);
    BinaryMask g = normalize_gesture(m);
    auto v1 = gesture_vector(g);
    auto v2 = gesture_vector(g);
    CHECK(v1.size() == 17);
    for (double x : v1) CHECK(std::isfinite(x));
    CHECK(v1 == v2);
    CHECK(v1[6] == 1.0);  // first Fourier magnitude after normalization
}

TEST_CASE("gesture_vector: invariant to pre-normalization uniform scaling") {
    BinaryMask m(32, 32);
    for (int y = 6; y < 26; ++y)
        for (int x = 4; x < 28; ++x) m.set(x, y, true);
    for (int y = 1; y < 6; ++y)
        for (int x = 10; x < 14; ++x) m.set(x, y, true);

    BinaryMask doubled(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) doubled.set(x, y, m.get(x / 2, y / 2));

    auto a = gesture_vector(normalize_gesture(m));
    auto b = gesture_vector(normalize_gesture(doubled));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-6));
}

}  // TEST_SUITE

#include <doctest.h>

#include <algorithm>
#include <map>

#include "hci/rng.hpp"
#include "hci/segmentation.hpp"

using namespace hci;

namespace {

BinaryMask random_mask(Rng& rng, int max_side, double fill = 0.45) {
    const int w = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_side)));
    const int h = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_side)));
    BinaryMask m(w, h);
    for (auto& b : m.bits) b = rng.uniform01() < fill ? 1 : 0;
    return m;
}

// Independent flood-fill labeling oracle (8-connectivity).
std::vector<std::int32_t> flood_fill_oracle(const BinaryMask& m) {
    std::vector<std::int32_t> labels(m.bits.size(), 0);
    std::int32_t next = 1;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (!m.get(x, y) || labels[std::size_t(y) * m.width + x]) continue;
            std::vector<std::pair<int, int>> frontier{{x, y}};
            labels[std::size_t(y) * m.width + x] = next;
            while (!frontier.empty()) {
                auto [px, py] = frontier.back();
                frontier.pop_back();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx, ny = py + dy;
                        if (nx < 0 || nx >= m.width || ny < 0 || ny >= m.height) continue;
                        const std::size_t ni = std::size_t(ny) * m.width + nx;
                        if (m.bits[ni] && !labels[ni]) {
                            labels[ni] = next;
                            frontier.emplace_back(nx, ny);
                        }
                    }
            }
            ++next;
        }
    }
    return labels;
}

// Relabel by first occurrence in raster order so labelings compare up to renaming.
std::vector<std::int32_t> canonical(const std::vector<std::int32_t>& labels) {
    std::map<std::int32_t, std::int32_t> remap;
    std::vector<std::int32_t> out(labels.size(), 0);
    std::int32_t next = 1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i]) continue;
        auto [it, inserted] = remap.emplace(labels[i], next);
        if (inserted) ++next;
        out[i] = it->second;
    }
    return out;
}

BinaryMask embed_with_margin(const BinaryMask& m, int margin) {
    BinaryMask out(m.width + 2 * margin, m.height + 2 * margin);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) out.set(x + margin, y + margin, m.get(x, y));
    return out;
}

BinaryMask complement(const BinaryMask& m) {
    BinaryMask out(m.width, m.height);
    for (std::size_t i = 0; i < m.bits.size(); ++i) out.bits[i] = m.bits[i] ? 0 : 1;
    return out;
}

bool subset_of(const BinaryMask& a, const BinaryMask& b) {
    for (std::size_t i = 0; i < a.bits.size(); ++i)
        if (a.bits[i] && !b.bits[i]) return false;
    return true;
}

Frame solid_frame(int w, int h, Rgb c) { return Frame(w, h, c); }

}  // namespace

TEST_SUITE("segmentation") {

TEST_CASE("skin_mask: all-black frame gives empty mask under the default rule") {
    // black has Cb = Cr = 128; the default Cb interval tops out at 127
    BinaryMask m = skin_mask(solid_frame(8, 8, {0, 0, 0}), SkinRule{});
    CHECK(m.count() == 0);
}

TEST_CASE("skin_mask: single interior-skin pixel is the only one set") {
    // (180,120,90) -> YCbCr (135,103,160), strictly inside the default intervals
    Frame f(5, 5, {0, 0, 255});
    f.set(2, 3, {180, 120, 90});
    BinaryMask m = skin_mask(f, SkinRule{});
    CHECK(m.count() == 1);
    CHECK(m.get(2, 3));
}

TEST_CASE("skin_mask: half skin / half blue matches a per-pixel oracle") {
    Frame f(10, 6, {0, 0, 255});
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 5; ++x) f.set(x, y, {180, 120, 90});
    const SkinRule rule{};
    BinaryMask m = skin_mask(f, rule);
    const YCbCrPlanes p = rgb_to_ycbcr(f);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 10; ++x) {
            const std::size_t i = std::size_t(y) * 10 + x;
            const bool expect = p.cb[i] >= rule.cb_lo && p.cb[i] <= rule.cb_hi && p.cr[i] >= rule.cr_lo &&
                                p.cr[i] <= rule.cr_hi && p.y[i] >= rule.y_min;
            CHECK(m.get(x, y) == expect);
            CHECK(m.get(x, y) == (x < 5));
        }
}

TEST_CASE("erode: a single set pixel vanishes at radius 1") {
    BinaryMask m(7, 7);
    m.set(3, 3, true);
    CHECK(erode(m, 1).count() == 0);
}

TEST_CASE("dilate: single pixel at radius 2 gives the 13-pixel discrete disk") {
    // lattice points with dx^2 + dy^2 <= 4
    BinaryMask m(9, 9);
    m.set(4, 4, true);
    BinaryMask d = dilate(m, 2);
    CHECK(d.count() == 13);
    for (int dy = -4; dy <= 4; ++dy)
        for (int dx = -4; dx <= 4; ++dx)
            CHECK(d.get(4 + dx, 4 + dy) == (dx * dx + dy * dy <= 4));
}

TEST_CASE("morphology: opening is anti-extensive on random masks") {
    Rng rng(101);
    for (int t = 0; t < 30; ++t) {
        BinaryMask m = random_mask(rng, 24);
        for (int r = 1; r <= 2; ++r) CHECK(subset_of(dilate(erode(m, r), r), m));
    }
}

TEST_CASE("morphology: duality dilate(m) == ~erode(~m) with border-as-background") {
    // complement taken on a canvas padded by r so the background beyond the
    // original border participates explicitly
    Rng rng(103);
    for (int t = 0; t < 30; ++t) {
        BinaryMask m = random_mask(rng, 20);
        for (int r = 1; r <= 2; ++r) {
            BinaryMask eroded = erode(complement(embed_with_margin(m, r)), r);
            BinaryMask dual = crop(complement(eroded), r, r, m.width, m.height);
            CHECK(dual == dilate(m, r));
        }
    }
}

TEST_CASE("morphology: open-then-close is idempotent on its own output") {
    Rng rng(107);
    auto open_close = [](const BinaryMask& m, int r) { return dilate(erode(dilate(erode(m, r), r), r), r); };
    for (int t = 0; t < 10; ++t) {
        BinaryMask m = random_mask(rng, 24);
        BinaryMask once = open_close(m, 1);
        CHECK(open_close(once, 1) == once);
    }
}

TEST_CASE("fill_holes: hollow ring becomes a solid block") {
    BinaryMask m(7, 7);
    for (int i = 1; i <= 5; ++i) {
        m.set(i, 1, true);
        m.set(i, 5, true);
        m.set(1, i, true);
        m.set(5, i, true);
    }
    BinaryMask filled = fill_holes(m);
    for (int y = 1; y <= 5; ++y)
        for (int x = 1; x <= 5; ++x) CHECK(filled.get(x, y));
    CHECK(filled.count() == 25);
}

TEST_CASE("fill_holes: border-touching mask with one interior hole") {
    BinaryMask m(5, 5, true);
    m.set(2, 2, false);
    BinaryMask filled = fill_holes(m);
    CHECK(filled.count() == 25);
}

TEST_CASE("fill_holes: idempotent on a solid mask") {
    BinaryMask m(6, 4, true);
    CHECK(fill_holes(m) == m);
    BinaryMask empty(6, 4);
    CHECK(fill_holes(empty) == empty);
}

TEST_CASE("label_components: two disjoint squares sorted by area") {
    BinaryMask m(32, 32);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) m.set(x, y, true);
    for (int y = 20; y < 25; ++y)
        for (int x = 20; x < 25; ++x) m.set(x, y, true);
    auto comps = label_components(m);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].area == 100);
    CHECK(comps[1].area == 25);
    CHECK(comps[0].w == 10);
    CHECK(comps[1].x == 20);
    CHECK(comps[0].cx == doctest::Approx(4.5));
    CHECK(comps[1].cy == doctest::Approx(22.0));
}

TEST_CASE("label_components: empty mask gives empty list") {
    CHECK(label_components(BinaryMask(4, 4)).empty());
}

TEST_CASE("label_components: random masks match the flood-fill oracle up to renaming") {
    Rng rng(109);
    for (int t = 0; t < 200; ++t) {
        BinaryMask m = random_mask(rng, 32);
        std::vector<std::int32_t> got;
        auto comps = label_components(m, &got);
        CHECK(canonical(got) == canonical(flood_fill_oracle(m)));

        std::int64_t total = 0;
        for (const auto& c : comps) {
            total += c.area;
            CHECK(c.area >= 1);
            CHECK(c.area <= std::int64_t(c.w) * c.h);
            CHECK(c.cx >= c.x);
            CHECK(c.cx <= c.x + c.w - 1);
            CHECK(c.cy >= c.y);
            CHECK(c.cy <= c.y + c.h - 1);
        }
        CHECK(total == static_cast<std::int64_t>(m.count()));
        for (std::size_t i = 1; i < comps.size(); ++i) CHECK(comps[i - 1].area >= comps[i].area);
    }
}

TEST_CASE("select_candidates: keeps the two largest above the threshold") {
    Component a, b, c;
    a.area = 500;
    b.area = 300;
    c.area = 10;
    auto picked = select_candidates({a, b, c}, 50);
    REQUIRE(picked.has_value());
    CHECK(picked->first.area == 500);
    CHECK(picked->second.area == 300);
}

TEST_CASE("select_candidates: fewer than two survivors is a miss") {
    Component a;
    a.area = 40;
    CHECK_FALSE(select_candidates({a}, 50).has_value());
    CHECK_FALSE(select_candidates({}, 0).has_value());
}

TEST_CASE("select_candidates: equal areas tie-break on bbox origin (y, then x)") {
    Component a, b;
    a.area = b.area = 100;
    a.x = 0;
    a.y = 0;
    b.x = 10;
    b.y = 0;
    auto picked = select_candidates({b, a}, 1);
    REQUIRE(picked.has_value());
    CHECK(picked->first.x == 0);
    CHECK(picked->second.x == 10);
}

}  // TEST_SUITE

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hci/image.hpp"
#include "hci/rng.hpp"

using namespace hci;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "hci_imaging_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_raw(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// naive rectangle sum, the oracle integral images must match exactly
std::uint64_t naive_rect_sum(const GrayImage& img, int x, int y, int w, int h) {
    std::uint64_t s = 0;
    for (int j = y; j < y + h; ++j)
        for (int i = x; i < x + w; ++i) s += img.at(i, j);
    return s;
}

}  // namespace

TEST_SUITE("imaging") {

TEST_CASE("ycbcr: black maps to zero luma, neutral chroma") {
    Frame f(1, 1, {0, 0, 0});
    auto p = rgb_to_ycbcr(f);
    CHECK(p.y[0] == 0);
    CHECK(p.cb[0] == 128);
    CHECK(p.cr[0] == 128);
}

TEST_CASE("ycbcr: gray axis has neutral chroma") {
    Frame f(1, 1, {255, 255, 255});
    auto p = rgb_to_ycbcr(f);
    CHECK(p.y[0] == 255);
    CHECK(p.cb[0] == 128);
    CHECK(p.cr[0] == 128);
}

TEST_CASE("ycbcr: pure red, hand-evaluated from the full-range matrix") {
    // Y  = 0.299*255            = 76.245  -> 76
    // Cb = 128 - 0.168736*255   = 84.97232 -> 85
    // Cr = 128 + 0.5*255        = 255.5   -> 256, clamped to 255
    Frame f(1, 1, {255, 0, 0});
    auto p = rgb_to_ycbcr(f);
    CHECK(p.y[0] == 76);
    CHECK(p.cb[0] == 85);
    CHECK(p.cr[0] == 255);
}

TEST_CASE("ycbcr: forward then inverse reproduces RGB within +/-1 per channel") {
    Rng rng(11);
    Frame f(64, 16);
    for (auto& b : f.pixels) b = static_cast<std::uint8_t>(rng.below(256));
    auto p = rgb_to_ycbcr(f);
    for (std::size_t i = 0; i < p.y.size(); ++i) {
        const Rgb back = ycbcr_to_rgb(p.y[i], p.cb[i], p.cr[i]);
        const Rgb orig{f.pixels[3 * i], f.pixels[3 * i + 1], f.pixels[3 * i + 2]};
        CHECK(std::abs(int(back.r) - int(orig.r)) <= 1);
        CHECK(std::abs(int(back.g) - int(orig.g)) <= 1);
        CHECK(std::abs(int(back.b) - int(orig.b)) <= 1);
    }
}

TEST_CASE("integral: whole-image sums") {
    GrayImage ones(2, 2, 1);
    CHECK(integral(ones).rect_sum(0, 0, 2, 2) == 4);
    GrayImage single(1, 1, 137);
    CHECK(integral(single).rect_sum(0, 0, 1, 1) == 137);
}

TEST_CASE("integral: first row and column are zero, entries monotone") {
    Rng rng(3);
    GrayImage img(7, 5);
    for (auto& b : img.pixels) b = static_cast<std::uint8_t>(rng.below(256));
    auto ii = integral(img);
    for (int x = 0; x <= img.width; ++x) CHECK(ii.at(0, x) == 0);
    for (int y = 0; y <= img.height; ++y) CHECK(ii.at(y, 0) == 0);
    for (int y = 1; y <= img.height; ++y)
        for (int x = 1; x <= img.width; ++x) {
            CHECK(ii.at(y, x) >= ii.at(y - 1, x));
            CHECK(ii.at(y, x) >= ii.at(y, x - 1));
        }
}

TEST_CASE("integral: all 225 sub-rectangles of a random 5x5 match the naive oracle") {
    Rng rng(7);
    GrayImage img(5, 5);
    for (auto& b : img.pixels) b = static_cast<std::uint8_t>(rng.below(256));
    auto ii = integral(img);
    int checked = 0;
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x)
            for (int h = 1; y + h <= 5; ++h)
                for (int w = 1; x + w <= 5; ++w) {
                    CHECK(ii.rect_sum(x, y, w, h) == naive_rect_sum(img, x, y, w, h));
                    ++checked;
                }
    CHECK(checked == 225);
}

TEST_CASE("integral: random images up to 64x64 match the oracle on sampled rectangles") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 1 + static_cast<int>(rng.below(64));
        const int h = 1 + static_cast<int>(rng.below(64));
        GrayImage img(w, h);
        for (auto& b : img.pixels) b = static_cast<std::uint8_t>(rng.below(256));
        auto ii = integral(img);
        for (int k = 0; k < 50; ++k) {
            const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(w)));
            const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(h)));
            const int rw = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(w - x)));
            const int rh = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(h - y)));
            CHECK(ii.rect_sum(x, y, rw, rh) == naive_rect_sum(img, x, y, rw, rh));
        }
    }
}

TEST_CASE("pnm: P6 round-trip is byte-identical") {
    Rng rng(23);
    Frame f(9, 4);
    for (auto& b : f.pixels) b = static_cast<std::uint8_t>(rng.below(256));
    auto path = tmp_file("roundtrip.ppm");
    write_pnm(f, path.string());
    Frame g = read_frame_pnm(path.string());
    CHECK(g.width == f.width);
    CHECK(g.height == f.height);
    CHECK(g.pixels == f.pixels);

    write_pnm(g, tmp_file("roundtrip2.ppm").string());
    std::ifstream a(path, std::ios::binary), b(tmp_file("roundtrip2.ppm"), std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("pnm: P5 round-trip is byte-identical") {
    Rng rng(29);
    GrayImage g(5, 7);
    for (auto& b : g.pixels) b = static_cast<std::uint8_t>(rng.below(256));
    auto path = tmp_file("roundtrip.pgm");
    write_pnm(g, path.string());
    GrayImage h = read_gray_pnm(path.string());
    CHECK(h.pixels == g.pixels);
}

TEST_CASE("pnm: minimal P6 header with 12 payload bytes gives a 2x2 frame") {
    auto path = tmp_file("minimal.ppm");
    write_raw(path, std::string("P6\n2 2\n255\n") + std::string(12, '\x42'));
    Frame f = read_frame_pnm(path.string());
    CHECK(f.width == 2);
    CHECK(f.height == 2);
    CHECK(f.pixels == std::vector<std::uint8_t>(12, 0x42));
}

TEST_CASE("pnm: maxval 65535 is rejected as unsupported depth") {
    auto path = tmp_file("depth.ppm");
    write_raw(path, std::string("P6\n2 2\n65535\n") + std::string(24, 'x'));
    CHECK_THROWS_AS(read_frame_pnm(path.string()), PnmUnsupportedError);
}

TEST_CASE("pnm: malformed header reports a byte offset") {
    auto bad_magic = tmp_file("bad_magic.ppm");
    write_raw(bad_magic, "Q6\n2 2\n255\n............");
    try {
        read_frame_pnm(bad_magic.string());
        FAIL("expected PnmParseError");
    } catch (const PnmParseError& e) {
        CHECK(e.offset == 0);
    }

    auto bad_dim = tmp_file("bad_dim.ppm");
    write_raw(bad_dim, "P6\nab 2\n255\n............");
    try {
        read_frame_pnm(bad_dim.string());
        FAIL("expected PnmParseError");
    } catch (const PnmParseError& e) {
        CHECK(e.offset == 3);
    }
}

TEST_CASE("pnm: truncated payload raises a distinct error") {
    auto path = tmp_file("short.ppm");
    write_raw(path, std::string("P6\n4 4\n255\n") + std::string(10, 'x'));
    CHECK_THROWS_AS(read_frame_pnm(path.string()), PnmTruncatedError);
}

TEST_CASE("pnm: header comments are accepted") {
    auto path = tmp_file("comments.pgm");
    write_raw(path, std::string("P5\n# a comment\n3 1\n255\n") + std::string(3, '\x07'));
    GrayImage g = read_gray_pnm(path.string());
    CHECK(g.width == 3);
    CHECK(g.height == 1);
}

TEST_CASE("resize_nearest: identity when dimensions are unchanged") {
    Rng rng(31);
    GrayImage g(13, 9);
    for (auto& b : g.pixels) b = static_cast<std::uint8_t>(rng.below(256));
    GrayImage h = resize_nearest(g, 13, 9);
    CHECK(h.pixels == g.pixels);
}

}  // TEST_SUITE

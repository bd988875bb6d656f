#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hci {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Frame() = default;
    Frame(int w, int h, Rgb fill = {});

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    Rgb at(int x, int y) const {
        std::size_t i = 3 * (std::size_t(y) * width + x);
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        std::size_t i = 3 * (std::size_t(y) * width + x);
        pixels[i] = c.r;
        pixels[i + 1] = c.g;
        pixels[i + 2] = c.b;
    }
};

/// 8-bit single-channel raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0);

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::uint8_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { pixels[std::size_t(y) * width + x] = v; }
};

/// Boolean raster, row-major, one byte per pixel (0 or 1).
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false);

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool get(int x, int y) const { return bits[std::size_t(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[std::size_t(y) * width + x] = v ? 1 : 0; }
    std::size_t count() const;

    bool operator==(const BinaryMask&) const = default;
};

struct YCbCrPlanes {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> y, cb, cr;
};

/// Full-range BT.601 conversion, rounded half-up and clamped to [0,255]:
///   Y  =  0.299 R + 0.587 G + 0.114 B
///   Cb = -0.168736 R - 0.331264 G + 0.5 B + 128
///   Cr =  0.5 R - 0.418688 G - 0.081312 B + 128
YCbCrPlanes rgb_to_ycbcr(const Frame& frame);

/// Inverse of rgb_to_ycbcr (full-range BT.601), rounded half-up and clamped.
/// Round-tripping an RGB triple through both reproduces it within +/-1 per channel.
Rgb ycbcr_to_rgb(std::uint8_t y, std::uint8_t cb, std::uint8_t cr);

/// Luma plane of the full-range conversion.
GrayImage to_gray(const Frame& frame);

/// Summed-area table with a zero first row/column; entry (r,c) holds the sum of
/// all source pixels strictly above and left. 64-bit accumulators.
struct IntegralImage {
    int width = 0;   // source width
    int height = 0;  // source height
    std::vector<std::uint64_t> sums;  // (width+1) x (height+1)

    std::uint64_t at(int r, int c) const { return sums[std::size_t(r) * (width + 1) + c]; }

    /// Sum over the axis-aligned rectangle [x, x+w) x [y, y+h), four lookups.
    std::uint64_t rect_sum(int x, int y, int w, int h) const;
};

IntegralImage integral(const GrayImage& img);

struct PnmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Malformed header; `offset` is the byte position of the offending input.
struct PnmParseError : PnmError {
    std::size_t offset;
    PnmParseError(const std::string& what, std::size_t off);
};
/// Payload shorter than the header promises.
struct PnmTruncatedError : PnmError {
    using PnmError::PnmError;
};
/// Valid PNM but not binary P5/P6 with maxval 255.
struct PnmUnsupportedError : PnmError {
    using PnmError::PnmError;
};

Frame read_frame_pnm(const std::string& path);      // P6 only
GrayImage read_gray_pnm(const std::string& path);   // P5 only
void write_pnm(const Frame& f, const std::string& path);
void write_pnm(const GrayImage& g, const std::string& path);

GrayImage mask_to_gray(const BinaryMask& m);  // 0 -> 0, 1 -> 255
BinaryMask gray_to_mask(const GrayImage& g, std::uint8_t threshold = 128);

/// Nearest-neighbor resampling with pixel-center alignment; identity when
/// dimensions are unchanged.
GrayImage resize_nearest(const GrayImage& src, int w, int h);
BinaryMask resize_nearest(const BinaryMask& src, int w, int h);

GrayImage crop(const GrayImage& src, int x, int y, int w, int h);
BinaryMask crop(const BinaryMask& src, int x, int y, int w, int h);

}  // namespace hci

#include "hci/image.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hci {

namespace {

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

std::uint8_t clamp_u8(int v) {
    if (v < 0) return 0;
    if (v > 255) return 255;
    return static_cast<std::uint8_t>(v);
}

void check_dims(int w, int h, const char* what) {
    if (w < 1 || h < 1) throw std::invalid_argument(std::string(what) + ": dimensions must be >= 1");
}

}  // namespace

Frame::Frame(int w, int h, Rgb fill) : width(w), height(h) {
    check_dims(w, h, "Frame");
    pixels.resize(std::size_t(w) * h * 3);
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = fill.r;
        pixels[i + 1] = fill.g;
        pixels[i + 2] = fill.b;
    }
}

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
    check_dims(w, h, "GrayImage");
    pixels.assign(std::size_t(w) * h, fill);
}

BinaryMask::BinaryMask(int w, int h, bool fill) : width(w), height(h) {
    check_dims(w, h, "BinaryMask");
    bits.assign(std::size_t(w) * h, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
}

YCbCrPlanes rgb_to_ycbcr(const Frame& frame) {
    YCbCrPlanes out;
    out.width = frame.width;
    out.height = frame.height;
    const std::size_t n = std::size_t(frame.width) * frame.height;
    out.y.resize(n);
    out.cb.resize(n);
    out.cr.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = frame.pixels[3 * i];
        const double g = frame.pixels[3 * i + 1];
        const double b = frame.pixels[3 * i + 2];
        out.y[i] = clamp_u8(round_half_up(0.299 * r + 0.587 * g + 0.114 * b));
        out.cb[i] = clamp_u8(round_half_up(-0.168736 * r - 0.331264 * g + 0.5 * b + 128.0));
        out.cr[i] = clamp_u8(round_half_up(0.5 * r - 0.418688 * g - 0.081312 * b + 128.0));
    }
    return out;
}

Rgb ycbcr_to_rgb(std::uint8_t y, std::uint8_t cb, std::uint8_t cr) {
    const double yd = y, cbd = cb - 128.0, crd = cr - 128.0;
    Rgb out;
    out.r = clamp_u8(round_half_up(yd + 1.402 * crd));
    out.g = clamp_u8(round_half_up(yd - 0.344136 * cbd - 0.714136 * crd));
    out.b = clamp_u8(round_half_up(yd + 1.772 * cbd));
    return out;
}

GrayImage to_gray(const Frame& frame) {
    GrayImage out;
    out.width = frame.width;
    out.height = frame.height;
    const std::size_t n = std::size_t(frame.width) * frame.height;
    out.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = frame.pixels[3 * i];
        const double g = frame.pixels[3 * i + 1];
        const double b = frame.pixels[3 * i + 2];
        out.pixels[i] = clamp_u8(round_half_up(0.299 * r + 0.587 * g + 0.114 * b));
    }
    return out;
}

IntegralImage integral(const GrayImage& img) {
    check_dims(img.width, img.height, "integral");
    IntegralImage ii;
    ii.width = img.width;
    ii.height = img.height;
    const int w1 = img.width + 1;
    ii.sums.assign(std::size_t(w1) * (img.height + 1), 0);
    for (int y = 0; y < img.height; ++y) {
        std::uint64_t row = 0;
        for (int x = 0; x < img.width; ++x) {
            row += img.at(x, y);
            ii.sums[std::size_t(y + 1) * w1 + (x + 1)] = row + ii.sums[std::size_t(y) * w1 + (x + 1)];
        }
    }
    return ii;
}

std::uint64_t IntegralImage::rect_sum(int x, int y, int w, int h) const {
    return at(y + h, x + w) + at(y, x) - at(y, x + w) - at(y + h, x);
}

PnmParseError::PnmParseError(const std::string& what, std::size_t off)
    : PnmError(what + " (byte offset " + std::to_string(off) + ")"), offset(off) {}

namespace {

struct PnmHeader {
    char kind;  // '5' or '6'
    int width;
    int height;
    std::size_t payload_offset;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PnmError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Header grammar: magic, then whitespace-separated width/height/maxval with
// optional '#' comments, then exactly one whitespace byte before the payload.
PnmHeader parse_header(const std::string& data) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < data.size()) {
            if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&](const char* name) -> long {
        skip_ws();
        std::size_t start = pos;
        long v = 0;
        while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
            v = v * 10 + (data[pos] - '0');
            if (v > 1'000'000'000L) throw PnmParseError(std::string("oversized ") + name, start);
            ++pos;
        }
        if (pos == start) throw PnmParseError(std::string("expected ") + name, start);
        return v;
    };

    if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6'))
        throw PnmParseError("expected P5/P6 magic", 0);
    PnmHeader h;
    h.kind = data[1];
    pos = 2;
    long w = read_int("width");
    long hgt = read_int("height");
    long maxval = read_int("maxval");
    if (w < 1 || hgt < 1) throw PnmParseError("dimensions must be >= 1", pos);
    if (maxval != 255)
        throw PnmUnsupportedError("unsupported maxval " + std::to_string(maxval) + ", only 255 is supported");
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
        throw PnmParseError("expected single whitespace before payload", pos);
    ++pos;
    h.width = static_cast<int>(w);
    h.height = static_cast<int>(hgt);
    h.payload_offset = pos;
    return h;
}

}  // namespace

Frame read_frame_pnm(const std::string& path) {
    const std::string data = slurp(path);
    const PnmHeader h = parse_header(data);
    if (h.kind != '6') throw PnmUnsupportedError(path + ": expected P6, got P" + std::string(1, h.kind));
    const std::size_t need = std::size_t(h.width) * h.height * 3;
    if (data.size() - h.payload_offset < need)
        throw PnmTruncatedError(path + ": truncated payload, need " + std::to_string(need) + " bytes, have " +
                                std::to_string(data.size() - h.payload_offset));
    Frame f(h.width, h.height);
    std::copy_n(data.begin() + h.payload_offset, need, reinterpret_cast<char*>(f.pixels.data()));
    return f;
}

GrayImage read_gray_pnm(const std::string& path) {
    const std::string data = slurp(path);
    const PnmHeader h = parse_header(data);
    if (h.kind != '5') throw PnmUnsupportedError(path + ": expected P5, got P" + std::string(1, h.kind));
    const std::size_t need = std::size_t(h.width) * h.height;
    if (data.size() - h.payload_offset < need)
        throw PnmTruncatedError(path + ": truncated payload, need " + std::to_string(need) + " bytes, have " +
                                std::to_string(data.size() - h.payload_offset));
    GrayImage g(h.width, h.height);
    std::copy_n(data.begin() + h.payload_offset, need, reinterpret_cast<char*>(g.pixels.data()));
    return g;
}

namespace {

void write_bytes(const std::string& path, const std::string& header, const std::uint8_t* data, std::size_t n) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PnmError("cannot open " + path + " for writing");
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out) throw PnmError("write failed: " + path);
}

}  // namespace

void write_pnm(const Frame& f, const std::string& path) {
    check_dims(f.width, f.height, "write_pnm");
    std::string header = "P6\n" + std::to_string(f.width) + " " + std::to_string(f.height) + "\n255\n";
    write_bytes(path, header, f.pixels.data(), f.pixels.size());
}

void write_pnm(const GrayImage& g, const std::string& path) {
    check_dims(g.width, g.height, "write_pnm");
    std::string header = "P5\n" + std::to_string(g.width) + " " + std::to_string(g.height) + "\n255\n";
    write_bytes(path, header, g.pixels.data(), g.pixels.size());
}

GrayImage mask_to_gray(const BinaryMask& m) {
    GrayImage g(m.width, m.height);
    for (std::size_t i = 0; i < m.bits.size(); ++i) g.pixels[i] = m.bits[i] ? 255 : 0;
    return g;
}

BinaryMask gray_to_mask(const GrayImage& g, std::uint8_t threshold) {
    BinaryMask m(g.width, g.height);
    for (std::size_t i = 0; i < g.pixels.size(); ++i) m.bits[i] = g.pixels[i] >= threshold ? 1 : 0;
    return m;
}

namespace {

// dst index i maps to src index floor((i + 0.5) * src / dst)
inline int nn_index(int i, int src, int dst) {
    int s = static_cast<int>((std::int64_t(2 * i + 1) * src) / (2 * dst));
    return s < src ? s : src - 1;
}

}  // namespace

GrayImage resize_nearest(const GrayImage& src, int w, int h) {
    check_dims(w, h, "resize_nearest");
    check_dims(src.width, src.height, "resize_nearest source");
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const int sy = nn_index(y, src.height, h);
        for (int x = 0; x < w; ++x) out.set(x, y, src.at(nn_index(x, src.width, w), sy));
    }
    return out;
}

BinaryMask resize_nearest(const BinaryMask& src, int w, int h) {
    check_dims(w, h, "resize_nearest");
    check_dims(src.width, src.height, "resize_nearest source");
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        const int sy = nn_index(y, src.height, h);
        for (int x = 0; x < w; ++x) out.set(x, y, src.get(nn_index(x, src.width, w), sy));
    }
    return out;
}

GrayImage crop(const GrayImage& src, int x, int y, int w, int h) {
    if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > src.width || y + h > src.height)
        throw std::invalid_argument("crop: rectangle out of bounds");
    GrayImage out(w, h);
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) out.set(i, j, src.at(x + i, y + j));
    return out;
}

BinaryMask crop(const BinaryMask& src, int x, int y, int w, int h) {
    if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > src.width || y + h > src.height)
        throw std::invalid_argument("crop: rectangle out of bounds");
    BinaryMask out(w, h);
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) out.set(i, j, src.get(x + i, y + j));
    return out;
}

}  // namespace hci

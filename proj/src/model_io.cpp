#include "hci/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace hci {

namespace {

constexpr char kMagic[8] = {'H', 'C', 'I', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kKindMoe = 1;
constexpr std::uint32_t kKindPca = 2;

class Writer {
public:
    explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw ModelIoError("cannot open model file for writing: " + path);
    }
    void u32(std::uint32_t v) {
        char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(b, 4);
    }
    void f64(double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
        out_.write(b, 8);
    }
    void f64s(const std::vector<double>& v) {
        for (double x : v) f64(x);
    }
    void raw(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }
    void finish() {
        if (!out_) throw ModelIoError("write failed: " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw ModelIoError("cannot open model file: " + path);
    }
    std::uint32_t u32() {
        char b[4];
        read(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }
    double f64() {
        char b[8];
        read(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return std::bit_cast<double>(v);
    }
    std::vector<double> f64s(std::size_t n) {
        std::vector<double> v(n);
        for (double& x : v) x = f64();
        return v;
    }
    void read(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) throw ModelIoError("truncated model file: " + path_);
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
};

std::uint32_t open_container(Reader& r, std::uint32_t expected_kind) {
    char magic[8];
    r.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) throw ModelIoError("bad magic in model file: " + r.path());
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw ModelIoError("unsupported model version " + std::to_string(version) + " in " + r.path());
    const std::uint32_t kind = r.u32();
    if (kind != expected_kind)
        throw ModelIoError("model file " + r.path() + " holds kind " + std::to_string(kind) + ", expected " +
                           std::to_string(expected_kind));
    return kind;
}

void write_mlp(Writer& w, const Mlp& m) {
    w.u32(static_cast<std::uint32_t>(m.in_dim));
    w.u32(static_cast<std::uint32_t>(m.hidden_dim));
    w.u32(static_cast<std::uint32_t>(m.out_dim));
    w.f64s(m.w_hidden);
    w.f64s(m.w_out);
}

Mlp read_mlp(Reader& r) {
    Mlp m;
    m.in_dim = static_cast<int>(r.u32());
    m.hidden_dim = static_cast<int>(r.u32());
    m.out_dim = static_cast<int>(r.u32());
    if (m.in_dim < 1 || m.hidden_dim < 1 || m.out_dim < 1 || m.in_dim > 1'000'000 || m.hidden_dim > 1'000'000 ||
        m.out_dim > 1'000'000)
        throw ModelIoError("implausible MLP dimensions in " + r.path());
    m.w_hidden = r.f64s(std::size_t(m.hidden_dim) * (m.in_dim + 1));
    m.w_out = r.f64s(std::size_t(m.out_dim) * (m.hidden_dim + 1));
    return m;
}

}  // namespace

void save_moe(const MoEModel& model, const std::string& path) {
    Writer w(path);
    w.raw(kMagic, 8);
    w.u32(kVersion);
    w.u32(kKindMoe);
    w.u32(static_cast<std::uint32_t>(model.input_dim));
    w.u32(static_cast<std::uint32_t>(model.class_count));
    w.u32(static_cast<std::uint32_t>(model.experts.size()));
    w.f64s(model.feat_mean);
    w.f64s(model.feat_scale);
    for (const Mlp& e : model.experts) write_mlp(w, e);
    write_mlp(w, model.gating);
    w.finish();
}

MoEModel load_moe(const std::string& path) {
    Reader r(path);
    open_container(r, kKindMoe);
    MoEModel model;
    model.input_dim = static_cast<int>(r.u32());
    model.class_count = static_cast<int>(r.u32());
    const std::uint32_t n_experts = r.u32();
    if (model.input_dim < 1 || model.class_count < 1 || n_experts < 1 || n_experts > 10'000)
        throw ModelIoError("implausible MoE dimensions in " + path);
    model.feat_mean = r.f64s(static_cast<std::size_t>(model.input_dim));
    model.feat_scale = r.f64s(static_cast<std::size_t>(model.input_dim));
    for (std::uint32_t i = 0; i < n_experts; ++i) model.experts.push_back(read_mlp(r));
    model.gating = read_mlp(r);
    return model;
}

void save_pca(const PcaModel& model, const Gallery& gallery, const std::string& path) {
    Writer w(path);
    w.raw(kMagic, 8);
    w.u32(kVersion);
    w.u32(kKindPca);
    w.u32(static_cast<std::uint32_t>(model.face_w));
    w.u32(static_cast<std::uint32_t>(model.face_h));
    w.u32(static_cast<std::uint32_t>(model.mean.size()));
    w.u32(static_cast<std::uint32_t>(model.components.size()));
    w.f64s(model.mean);
    for (const auto& comp : model.components) w.f64s(comp);
    w.f64s(model.eigenvalues);
    w.f64(gallery.threshold);
    w.u32(static_cast<std::uint32_t>(gallery.entries.size()));
    for (const GalleryEntry& e : gallery.entries) {
        w.u32(static_cast<std::uint32_t>(e.identity));
        w.f64s(e.coords);
    }
    w.finish();
}

std::pair<PcaModel, Gallery> load_pca(const std::string& path) {
    Reader r(path);
    open_container(r, kKindPca);
    PcaModel model;
    model.face_w = static_cast<int>(r.u32());
    model.face_h = static_cast<int>(r.u32());
    const std::uint32_t dim = r.u32();
    const std::uint32_t k = r.u32();
    if (dim < 1 || k < 1 || dim > 100'000'000 || k > dim)
        throw ModelIoError("implausible PCA dimensions in " + path);
    model.mean = r.f64s(dim);
    for (std::uint32_t i = 0; i < k; ++i) model.components.push_back(r.f64s(dim));
    model.eigenvalues = r.f64s(k);
    Gallery gallery;
    gallery.threshold = r.f64();
    const std::uint32_t n_entries = r.u32();
    if (n_entries > 10'000'000) throw ModelIoError("implausible gallery size in " + path);
    for (std::uint32_t i = 0; i < n_entries; ++i) {
        GalleryEntry e;
        e.identity = static_cast<int>(r.u32());
        e.coords = r.f64s(k);
        gallery.entries.push_back(std::move(e));
    }
    return {std::move(model), std::move(gallery)};
}

}  // namespace hci

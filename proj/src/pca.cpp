#include "hci/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hci {

namespace {

// Cyclic Jacobi eigensolver for a symmetric matrix (row-major n x n).
// Eigenvectors come back as columns of `vecs`.
void jacobi_eigen(std::vector<double> a, int n, std::vector<double>& vals, std::vector<double>& vecs) {
    vecs.assign(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) vecs[std::size_t(i) * n + i] = 1.0;
    auto A = [&](int r, int c) -> double& { return a[std::size_t(r) * n + c]; };
    auto V = [&](int r, int c) -> double& { return vecs[std::size_t(r) * n + c]; };

    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(A(i, i)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) scale = std::max(scale, std::abs(A(i, j)));
    const double tol = 1e-10 * std::max(scale, 1.0);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off = std::max(off, std::abs(A(i, j)));
        if (off < tol) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A(p, q)) < tol * 1e-3) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    vals.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = A(i, i);
}

void fix_sign(std::vector<double>& component) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < component.size(); ++i)
        if (std::abs(component[i]) > std::abs(component[arg])) arg = i;
    if (component[arg] < 0)
        for (double& v : component) v = -v;
}

}  // namespace

PcaModel fit_pca(const std::vector<std::vector<double>>& samples, int k) {
    const int n = static_cast<int>(samples.size());
    if (n < 2) throw std::invalid_argument("fit_pca: need at least 2 samples");
    const int dim = static_cast<int>(samples[0].size());
    for (const auto& s : samples)
        if (static_cast<int>(s.size()) != dim) throw std::invalid_argument("fit_pca: inconsistent sample size");
    if (k < 1 || k > std::min(n - 1, dim))
        throw std::invalid_argument("fit_pca: k must be in [1, min(samples-1, dimension)]");

    PcaModel model;
    model.mean.assign(static_cast<std::size_t>(dim), 0.0);
    for (const auto& s : samples)
        for (int d = 0; d < dim; ++d) model.mean[static_cast<std::size_t>(d)] += s[static_cast<std::size_t>(d)];
    for (double& m : model.mean) m /= n;

    std::vector<std::vector<double>> centered(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        centered[i].resize(static_cast<std::size_t>(dim));
        for (int d = 0; d < dim; ++d)
            centered[i][static_cast<std::size_t>(d)] =
                samples[i][static_cast<std::size_t>(d)] - model.mean[static_cast<std::size_t>(d)];
    }

    std::vector<double> vals, vecs;
    std::vector<std::pair<double, int>> ranked;

    if (n < dim) {
        // Gram trick: eigenvectors of X X^T lift to pixel space
        std::vector<double> gram(std::size_t(n) * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double dot = 0.0;
                for (int d = 0; d < dim; ++d)
                    dot += centered[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] *
                           centered[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)];
                gram[std::size_t(i) * n + j] = gram[std::size_t(j) * n + i] = dot;
            }
        jacobi_eigen(std::move(gram), n, vals, vecs);
        for (int i = 0; i < n; ++i) ranked.emplace_back(vals[static_cast<std::size_t>(i)], i);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (int r = 0; r < k; ++r) {
            const int col = ranked[static_cast<std::size_t>(r)].second;
            std::vector<double> comp(static_cast<std::size_t>(dim), 0.0);
            for (int i = 0; i < n; ++i)
                for (int d = 0; d < dim; ++d)
                    comp[static_cast<std::size_t>(d)] += vecs[std::size_t(i) * n + col] *
                                                         centered[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
            double norm = std::sqrt(std::inner_product(comp.begin(), comp.end(), comp.begin(), 0.0));
            if (norm < 1e-12)
                throw std::invalid_argument("fit_pca: sample rank too low for the requested k");
            for (double& v : comp) v /= norm;
            fix_sign(comp);
            model.components.push_back(std::move(comp));
            model.eigenvalues.push_back(std::max(0.0, ranked[static_cast<std::size_t>(r)].first / (n - 1)));
        }
    } else {
        std::vector<double> cov(std::size_t(dim) * dim, 0.0);
        for (int i = 0; i < n; ++i)
            for (int r = 0; r < dim; ++r)
                for (int c = r; c < dim; ++c)
                    cov[std::size_t(r) * dim + c] += centered[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] *
                                                     centered[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        for (int r = 0; r < dim; ++r)
            for (int c = r; c < dim; ++c) {
                cov[std::size_t(r) * dim + c] /= (n - 1);
                cov[std::size_t(c) * dim + r] = cov[std::size_t(r) * dim + c];
            }
        jacobi_eigen(std::move(cov), dim, vals, vecs);
        for (int i = 0; i < dim; ++i) ranked.emplace_back(vals[static_cast<std::size_t>(i)], i);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (int r = 0; r < k; ++r) {
            const int col = ranked[static_cast<std::size_t>(r)].second;
            std::vector<double> comp(static_cast<std::size_t>(dim));
            for (int d = 0; d < dim; ++d) comp[static_cast<std::size_t>(d)] = vecs[std::size_t(d) * dim + col];
            fix_sign(comp);
            model.components.push_back(std::move(comp));
            model.eigenvalues.push_back(std::max(0.0, ranked[static_cast<std::size_t>(r)].first));
        }
    }
    return model;
}

std::vector<double> face_vector(const GrayImage& face) {
    std::vector<double> v(face.pixels.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = face.pixels[i];
    return v;
}

PcaModel fit_pca(const std::vector<GrayImage>& faces, int k) {
    if (faces.empty()) throw std::invalid_argument("fit_pca: no faces");
    std::vector<std::vector<double>> data;
    data.reserve(faces.size());
    for (const GrayImage& f : faces) {
        if (f.width != faces[0].width || f.height != faces[0].height)
            throw std::invalid_argument("fit_pca: faces must share dimensions");
        data.push_back(face_vector(f));
    }
    PcaModel model = fit_pca(data, k);
    model.face_w = faces[0].width;
    model.face_h = faces[0].height;
    return model;
}

std::vector<double> project(const std::vector<double>& sample, const PcaModel& model) {
    if (sample.size() != model.mean.size()) throw std::invalid_argument("project: dimension mismatch");
    std::vector<double> out(model.components.size(), 0.0);
    for (std::size_t r = 0; r < model.components.size(); ++r)
        for (std::size_t d = 0; d < sample.size(); ++d)
            out[r] += model.components[r][d] * (sample[d] - model.mean[d]);
    return out;
}

std::vector<double> project(const GrayImage& face, const PcaModel& model) {
    return project(face_vector(face), model);
}

std::vector<double> reconstruct(const std::vector<double>& coords, const PcaModel& model) {
    if (coords.size() != model.components.size()) throw std::invalid_argument("reconstruct: dimension mismatch");
    std::vector<double> out = model.mean;
    for (std::size_t r = 0; r < coords.size(); ++r)
        for (std::size_t d = 0; d < out.size(); ++d) out[d] += coords[r] * model.components[r][d];
    return out;
}

std::optional<int> verify(const std::vector<double>& face, const PcaModel& model, const Gallery& gallery) {
    if (gallery.entries.empty()) throw std::invalid_argument("verify: gallery has no identities");
    if (gallery.threshold <= 0.0) throw std::invalid_argument("verify: gallery threshold must be > 0");
    const std::vector<double> q = project(face, model);
    double best_d2 = 0.0;
    int best_id = 0;
    bool first = true;
    for (const GalleryEntry& e : gallery.entries) {
        if (e.coords.size() != q.size()) throw std::invalid_argument("verify: gallery entry dimension mismatch");
        double d2 = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) d2 += (q[i] - e.coords[i]) * (q[i] - e.coords[i]);
        if (first || d2 < best_d2 || (d2 == best_d2 && e.identity < best_id)) {
            best_d2 = d2;
            best_id = e.identity;
            first = false;
        }
    }
    if (std::sqrt(best_d2) <= gallery.threshold) return best_id;
    return std::nullopt;
}

std::optional<int> verify(const GrayImage& face, const PcaModel& model, const Gallery& gallery) {
    GrayImage patch = face;
    if (face.width != model.face_w || face.height != model.face_h) {
        if (model.face_w < 1 || model.face_h < 1)
            throw std::invalid_argument("verify: model carries no raster size");
        patch = resize_nearest(face, model.face_w, model.face_h);
    }
    return verify(face_vector(patch), model, gallery);
}

}  // namespace hci

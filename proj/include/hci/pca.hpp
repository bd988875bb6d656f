#pragma once

#include <optional>
#include <vector>

#include "hci/image.hpp"

namespace hci {

inline constexpr int kFacePatchSize = 32;  // faces are resized to 32x32 before PCA

struct PcaModel {
    int face_w = 0, face_h = 0;                    // raster size the model was fit on
    std::vector<double> mean;                      // pixel-space mean
    std::vector<std::vector<double>> components;   // k orthonormal rows, descending variance
    std::vector<double> eigenvalues;               // non-negative, non-increasing
};

/// Principal components of mean-centered samples. Uses the Gram-matrix trick
/// when there are fewer samples than pixels, otherwise decomposes the
/// covariance directly (Jacobi rotations, off-diagonal tolerance 1e-10).
/// Component signs are fixed so the largest-magnitude entry is positive.
/// Requires >= 2 samples and k <= min(samples - 1, dimension).
PcaModel fit_pca(const std::vector<std::vector<double>>& samples, int k);
PcaModel fit_pca(const std::vector<GrayImage>& faces, int k);

std::vector<double> project(const std::vector<double>& sample, const PcaModel& model);
std::vector<double> project(const GrayImage& face, const PcaModel& model);
std::vector<double> reconstruct(const std::vector<double>& coords, const PcaModel& model);

/// Raster -> double vector in raster scan order (values 0..255).
std::vector<double> face_vector(const GrayImage& face);

struct GalleryEntry {
    int identity = 0;
    std::vector<double> coords;  // projected, k-dim
};

struct Gallery {
    std::vector<GalleryEntry> entries;
    double threshold = 0.0;  // max accepted Euclidean distance, > 0
};

/// Nearest neighbor in PCA space; accepted iff the distance is within the
/// gallery threshold, ties broken by the lowest identity id. nullopt = rejected.
std::optional<int> verify(const std::vector<double>& face, const PcaModel& model, const Gallery& gallery);
std::optional<int> verify(const GrayImage& face, const PcaModel& model, const Gallery& gallery);

}  // namespace hci

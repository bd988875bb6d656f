#pragma once

#include <string>
#include <utility>

#include "hci/moe.hpp"
#include "hci/pca.hpp"

namespace hci {

/// Shared binary model container, little-endian throughout:
///   8-byte magic "HCIMODEL", u32 version (1), u32 kind (1 = MoE, 2 = PCA),
///   then the kind-specific payload of u32 dimensions followed by row-major
///   f64 matrices. The exact field order is documented in the README.
struct ModelIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void save_moe(const MoEModel& model, const std::string& path);
MoEModel load_moe(const std::string& path);

void save_pca(const PcaModel& model, const Gallery& gallery, const std::string& path);
std::pair<PcaModel, Gallery> load_pca(const std::string& path);

}  // namespace hci

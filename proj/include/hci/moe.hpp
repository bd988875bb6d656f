#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hci {

/// Two-layer perceptron, sigmoid at both layers. Weight rows carry the bias as
/// a trailing column applied to a fixed input of 1.
struct Mlp {
    int in_dim = 0, hidden_dim = 0, out_dim = 0;
    std::vector<double> w_hidden;  // hidden_dim x (in_dim + 1), row-major
    std::vector<double> w_out;     // out_dim x (hidden_dim + 1), row-major
};

struct MlpTrace {
    std::vector<double> hidden;  // sigmoid hidden activations
    std::vector<double> out;     // sigmoid outputs
};

MlpTrace mlp_forward(const Mlp& mlp, const std::vector<double>& x);

/// N expert MLPs plus a gating MLP whose sigmoid outputs tau feed a softmax
/// that produces the mixing weights g. Inputs are standardized with the stored
/// per-dimension mean/scale before any network sees them.
struct MoEModel {
    int input_dim = 0;
    int class_count = 0;
    std::vector<Mlp> experts;        // out_dim = class_count
    Mlp gating;                      // out_dim = expert count
    std::vector<double> feat_mean;   // identity transform when mean 0 / scale 1
    std::vector<double> feat_scale;

    int expert_count() const { return static_cast<int>(experts.size()); }
};

struct TrainConfig {
    double eta_expert = 0.9;
    double eta_gating = 0.4;
    int epochs = 300;
    int experts = 3;
    int expert_hidden = 20;
    int gating_hidden = 40;
    std::uint64_t seed = 1;
};

/// Fresh model, weights uniform in [-0.5, 0.5] from the seed, identity input
/// standardization.
MoEModel make_moe(int input_dim, int class_count, const TrainConfig& cfg);

/// Softmax mixing weights g_i = exp(tau_i) / sum_j exp(tau_j), computed with
/// max subtraction. Non-negative, sums to 1.
std::vector<double> gate(const MoEModel& model, const std::vector<double>& x);

struct MoEForward {
    std::vector<double> mixture;                     // T = sum_i g_i * O_i
    std::vector<std::vector<double>> expert_outputs; // O_i
    std::vector<double> g;
};

MoEForward moe_forward(const MoEModel& model, const std::vector<double>& x);

/// Per-expert responsibility h_i ~ g_i * exp(-1/2 |y - O_i|^2), normalized.
std::vector<double> posterior(const MoEModel& model, const std::vector<double>& x, const std::vector<double>& y);

/// Training objective: -log sum_i g_i exp(-1/2 |y - O_i|^2), the mixture
/// negative log-likelihood with unit-variance Gaussian experts. train_step
/// descends exactly this.
double moe_objective(const MoEModel& model, const std::vector<double>& x, const std::vector<double>& y);

/// One online update: h-weighted backprop on each expert (rate eta_expert) and
/// an (h - g)-driven update through the gating net (rate eta_gating). All
/// gradients are taken at the pre-update weights. Throws std::runtime_error
/// naming the layer when a non-finite value appears.
void train_step(MoEModel& model, const std::vector<double>& x, const std::vector<double>& y,
                const TrainConfig& cfg);

struct LabeledVector {
    std::vector<double> x;
    int label = 0;  // 1-based class index
};

struct TrainLogEntry {
    int epoch = 0;
    double train_acc = 0.0;
    double test_acc = 0.0;
};

struct TrainResult {
    MoEModel model;  // snapshot of the best held-out epoch
    std::vector<TrainLogEntry> log;
    int best_epoch = 0;
    double best_test_acc = 0.0;
};

/// Online training with a seeded shuffle each epoch, one-hot targets, inputs
/// standardized from the training set. Every class 1..class_count must appear
/// in the training set. Returns the model snapshot with the best held-out
/// accuracy (earliest epoch wins ties).
TrainResult train_moe(const std::vector<LabeledVector>& train_set, const std::vector<LabeledVector>& test_set,
                      int class_count, const TrainConfig& cfg);

struct Classification {
    int label = 0;  // 1-based
    double confidence = 0.0;
};

/// Argmax of the mixture output; ties break to the lowest class index.
Classification classify(const MoEModel& model, const std::vector<double>& x);

double accuracy(const MoEModel& model, const std::vector<LabeledVector>& set);

}  // namespace hci

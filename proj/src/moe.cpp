#include "hci/moe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hci/rng.hpp"

namespace hci {

namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

std::vector<double> standardized(const MoEModel& model, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != model.input_dim)
        throw std::invalid_argument("moe: input dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - model.feat_mean[i]) / model.feat_scale[i];
    return out;
}

std::vector<double> softmax(const std::vector<double>& tau) {
    const double m = *std::max_element(tau.begin(), tau.end());
    std::vector<double> g(tau.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        g[i] = std::exp(tau[i] - m);
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
}

void check_finite(const std::vector<double>& v, const char* layer) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::runtime_error(std::string("moe: non-finite value in ") + layer);
}

}  // namespace

MlpTrace mlp_forward(const Mlp& mlp, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != mlp.in_dim) throw std::invalid_argument("mlp_forward: dimension mismatch");
    MlpTrace t;
    t.hidden.resize(static_cast<std::size_t>(mlp.hidden_dim));
    const int in1 = mlp.in_dim + 1;
    for (int r = 0; r < mlp.hidden_dim; ++r) {
        const double* row = &mlp.w_hidden[std::size_t(r) * in1];
        double a = row[mlp.in_dim];  // bias
        for (int c = 0; c < mlp.in_dim; ++c) a += row[c] * x[static_cast<std::size_t>(c)];
        t.hidden[static_cast<std::size_t>(r)] = sigmoid(a);
    }
    t.out.resize(static_cast<std::size_t>(mlp.out_dim));
    const int h1 = mlp.hidden_dim + 1;
    for (int r = 0; r < mlp.out_dim; ++r) {
        const double* row = &mlp.w_out[std::size_t(r) * h1];
        double a = row[mlp.hidden_dim];
        for (int c = 0; c < mlp.hidden_dim; ++c) a += row[c] * t.hidden[static_cast<std::size_t>(c)];
        t.out[static_cast<std::size_t>(r)] = sigmoid(a);
    }
    return t;
}

namespace {

Mlp random_mlp(int in_dim, int hidden, int out_dim, Rng& rng) {
    Mlp m;
    m.in_dim = in_dim;
    m.hidden_dim = hidden;
    m.out_dim = out_dim;
    m.w_hidden.resize(std::size_t(hidden) * (in_dim + 1));
    m.w_out.resize(std::size_t(out_dim) * (hidden + 1));
    for (double& w : m.w_hidden) w = rng.uniform(-0.5, 0.5);
    for (double& w : m.w_out) w = rng.uniform(-0.5, 0.5);
    return m;
}

}  // namespace

MoEModel make_moe(int input_dim, int class_count, const TrainConfig& cfg) {
    if (cfg.experts < 1) throw std::invalid_argument("make_moe: need at least 1 expert");
    if (input_dim < 1 || class_count < 1) throw std::invalid_argument("make_moe: bad dimensions");
    Rng rng(cfg.seed);
    MoEModel model;
    model.input_dim = input_dim;
    model.class_count = class_count;
    for (int i = 0; i < cfg.experts; ++i)
        model.experts.push_back(random_mlp(input_dim, cfg.expert_hidden, class_count, rng));
    model.gating = random_mlp(input_dim, cfg.gating_hidden, cfg.experts, rng);
    model.feat_mean.assign(static_cast<std::size_t>(input_dim), 0.0);
    model.feat_scale.assign(static_cast<std::size_t>(input_dim), 1.0);
    return model;
}

std::vector<double> gate(const MoEModel& model, const std::vector<double>& x) {
    const std::vector<double> xs = standardized(model, x);
    return softmax(mlp_forward(model.gating, xs).out);
}

MoEForward moe_forward(const MoEModel& model, const std::vector<double>& x) {
    const std::vector<double> xs = standardized(model, x);
    MoEForward f;
    f.g = softmax(mlp_forward(model.gating, xs).out);
    f.mixture.assign(static_cast<std::size_t>(model.class_count), 0.0);
    for (std::size_t i = 0; i < model.experts.size(); ++i) {
        f.expert_outputs.push_back(mlp_forward(model.experts[i], xs).out);
        for (int c = 0; c < model.class_count; ++c)
            f.mixture[static_cast<std::size_t>(c)] += f.g[i] * f.expert_outputs[i][static_cast<std::size_t>(c)];
    }
    return f;
}

namespace {

std::vector<double> posterior_from(const std::vector<double>& g,
                                   const std::vector<std::vector<double>>& outputs,
                                   const std::vector<double>& y) {
    std::vector<double> log_lik(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double e = 0.0;
        for (std::size_t c = 0; c < y.size(); ++c) {
            const double d = y[c] - outputs[i][c];
            e += d * d;
        }
        log_lik[i] = -0.5 * e;
    }
    const double m = *std::max_element(log_lik.begin(), log_lik.end());
    std::vector<double> h(g.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        h[i] = g[i] * std::exp(log_lik[i] - m);
        sum += h[i];
    }
    for (double& v : h) v /= sum;
    return h;
}

}  // namespace

std::vector<double> posterior(const MoEModel& model, const std::vector<double>& x, const std::vector<double>& y) {
    if (static_cast<int>(y.size()) != model.class_count)
        throw std::invalid_argument("posterior: target dimension mismatch");
    const MoEForward f = moe_forward(model, x);
    return posterior_from(f.g, f.expert_outputs, y);
}

double moe_objective(const MoEModel& model, const std::vector<double>& x, const std::vector<double>& y) {
    const MoEForward f = moe_forward(model, x);
    double m = -1e300;
    std::vector<double> terms(f.g.size());
    for (std::size_t i = 0; i < f.g.size(); ++i) {
        double e = 0.0;
        for (std::size_t c = 0; c < y.size(); ++c) {
            const double d = y[c] - f.expert_outputs[i][c];
            e += d * d;
        }
        terms[i] = std::log(std::max(f.g[i], 1e-300)) - 0.5 * e;
        m = std::max(m, terms[i]);
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - m);
    return -(m + std::log(sum));
}

void train_step(MoEModel& model, const std::vector<double>& x, const std::vector<double>& y,
                const TrainConfig& cfg) {
    if (static_cast<int>(y.size()) != model.class_count)
        throw std::invalid_argument("train_step: target dimension mismatch");
    const std::vector<double> xs = standardized(model, x);
    const int n_exp = model.expert_count();

    std::vector<MlpTrace> expert_traces(static_cast<std::size_t>(n_exp));
    for (int i = 0; i < n_exp; ++i) {
        expert_traces[static_cast<std::size_t>(i)] = mlp_forward(model.experts[static_cast<std::size_t>(i)], xs);
        check_finite(expert_traces[static_cast<std::size_t>(i)].out, "expert output layer");
    }
    const MlpTrace gating_trace = mlp_forward(model.gating, xs);
    check_finite(gating_trace.out, "gating output layer");

    const std::vector<double>& tau = gating_trace.out;
    const std::vector<double> g = softmax(tau);
    std::vector<std::vector<double>> outputs(static_cast<std::size_t>(n_exp));
    for (int i = 0; i < n_exp; ++i) outputs[static_cast<std::size_t>(i)] = expert_traces[static_cast<std::size_t>(i)].out;
    const std::vector<double> h = posterior_from(g, outputs, y);

    // All deltas are taken at the pre-update weights and applied afterwards.
    struct MlpDelta {
        std::vector<double> w_hidden;
        std::vector<double> w_out;
    };
    std::vector<MlpDelta> expert_deltas(static_cast<std::size_t>(n_exp));

    for (int i = 0; i < n_exp; ++i) {
        const Mlp& mlp = model.experts[static_cast<std::size_t>(i)];
        const MlpTrace& tr = expert_traces[static_cast<std::size_t>(i)];
        MlpDelta& delta = expert_deltas[static_cast<std::size_t>(i)];
        delta.w_hidden.assign(mlp.w_hidden.size(), 0.0);
        delta.w_out.assign(mlp.w_out.size(), 0.0);

        std::vector<double> delta_out(static_cast<std::size_t>(mlp.out_dim));
        for (int r = 0; r < mlp.out_dim; ++r) {
            const double o = tr.out[static_cast<std::size_t>(r)];
            delta_out[static_cast<std::size_t>(r)] =
                h[static_cast<std::size_t>(i)] * (y[static_cast<std::size_t>(r)] - o) * o * (1.0 - o);
        }
        const int h1 = mlp.hidden_dim + 1;
        for (int r = 0; r < mlp.out_dim; ++r) {
            for (int c = 0; c < mlp.hidden_dim; ++c)
                delta.w_out[std::size_t(r) * h1 + c] =
                    cfg.eta_expert * delta_out[static_cast<std::size_t>(r)] * tr.hidden[static_cast<std::size_t>(c)];
            delta.w_out[std::size_t(r) * h1 + mlp.hidden_dim] =
                cfg.eta_expert * delta_out[static_cast<std::size_t>(r)];
        }
        const int in1 = mlp.in_dim + 1;
        for (int c = 0; c < mlp.hidden_dim; ++c) {
            double back = 0.0;
            for (int r = 0; r < mlp.out_dim; ++r)
                back += mlp.w_out[std::size_t(r) * h1 + c] * delta_out[static_cast<std::size_t>(r)];
            const double v = tr.hidden[static_cast<std::size_t>(c)];
            const double delta_hidden = back * v * (1.0 - v);
            for (int d = 0; d < mlp.in_dim; ++d)
                delta.w_hidden[std::size_t(c) * in1 + d] =
                    cfg.eta_expert * delta_hidden * xs[static_cast<std::size_t>(d)];
            delta.w_hidden[std::size_t(c) * in1 + mlp.in_dim] = cfg.eta_expert * delta_hidden;
        }
    }

    // gating chain: softmax gradient gives (h - g), then back through the
    // sigmoid tau layer and the hidden layer
    const Mlp& gmlp = model.gating;
    MlpDelta gating_delta;
    gating_delta.w_hidden.assign(gmlp.w_hidden.size(), 0.0);
    gating_delta.w_out.assign(gmlp.w_out.size(), 0.0);
    std::vector<double> delta_tau(static_cast<std::size_t>(n_exp));
    for (int i = 0; i < n_exp; ++i) {
        const double t = tau[static_cast<std::size_t>(i)];
        delta_tau[static_cast<std::size_t>(i)] =
            (h[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)]) * t * (1.0 - t);
    }
    const int gh1 = gmlp.hidden_dim + 1;
    for (int r = 0; r < gmlp.out_dim; ++r) {
        for (int c = 0; c < gmlp.hidden_dim; ++c)
            gating_delta.w_out[std::size_t(r) * gh1 + c] =
                cfg.eta_gating * delta_tau[static_cast<std::size_t>(r)] * gating_trace.hidden[static_cast<std::size_t>(c)];
        gating_delta.w_out[std::size_t(r) * gh1 + gmlp.hidden_dim] =
            cfg.eta_gating * delta_tau[static_cast<std::size_t>(r)];
    }
    const int gin1 = gmlp.in_dim + 1;
    for (int c = 0; c < gmlp.hidden_dim; ++c) {
        double back = 0.0;
        for (int r = 0; r < gmlp.out_dim; ++r)
            back += gmlp.w_out[std::size_t(r) * gh1 + c] * delta_tau[static_cast<std::size_t>(r)];
        const double v = gating_trace.hidden[static_cast<std::size_t>(c)];
        const double delta_hidden = back * v * (1.0 - v);
        for (int d = 0; d < gmlp.in_dim; ++d)
            gating_delta.w_hidden[std::size_t(c) * gin1 + d] =
                cfg.eta_gating * delta_hidden * xs[static_cast<std::size_t>(d)];
        gating_delta.w_hidden[std::size_t(c) * gin1 + gmlp.in_dim] = cfg.eta_gating * delta_hidden;
    }

    for (int i = 0; i < n_exp; ++i) {
        Mlp& mlp = model.experts[static_cast<std::size_t>(i)];
        const MlpDelta& delta = expert_deltas[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < mlp.w_hidden.size(); ++j) mlp.w_hidden[j] += delta.w_hidden[j];
        for (std::size_t j = 0; j < mlp.w_out.size(); ++j) mlp.w_out[j] += delta.w_out[j];
        check_finite(mlp.w_hidden, "expert hidden weights");
        check_finite(mlp.w_out, "expert output weights");
    }
    for (std::size_t j = 0; j < model.gating.w_hidden.size(); ++j)
        model.gating.w_hidden[j] += gating_delta.w_hidden[j];
    for (std::size_t j = 0; j < model.gating.w_out.size(); ++j) model.gating.w_out[j] += gating_delta.w_out[j];
    check_finite(model.gating.w_hidden, "gating hidden weights");
    check_finite(model.gating.w_out, "gating output weights");
}

Classification classify(const MoEModel& model, const std::vector<double>& x) {
    const MoEForward f = moe_forward(model, x);
    std::size_t arg = 0;
    for (std::size_t c = 1; c < f.mixture.size(); ++c)
        if (f.mixture[c] > f.mixture[arg]) arg = c;
    return {static_cast<int>(arg) + 1, f.mixture[arg]};
}

double accuracy(const MoEModel& model, const std::vector<LabeledVector>& set) {
    if (set.empty()) return 0.0;
    int correct = 0;
    for (const LabeledVector& s : set)
        if (classify(model, s.x).label == s.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(set.size());
}

TrainResult train_moe(const std::vector<LabeledVector>& train_set, const std::vector<LabeledVector>& test_set,
                      int class_count, const TrainConfig& cfg) {
    if (train_set.empty()) throw std::invalid_argument("train_moe: empty training set");
    const int input_dim = static_cast<int>(train_set[0].x.size());
    std::vector<bool> seen(static_cast<std::size_t>(class_count), false);
    for (const LabeledVector& s : train_set) {
        if (s.label < 1 || s.label > class_count) throw std::invalid_argument("train_moe: label out of range");
        seen[static_cast<std::size_t>(s.label - 1)] = true;
    }
    for (int c = 0; c < class_count; ++c)
        if (!seen[static_cast<std::size_t>(c)])
            throw std::invalid_argument("train_moe: class " + std::to_string(c + 1) + " missing from training set");

    MoEModel model = make_moe(input_dim, class_count, cfg);

    // standardize inputs from training statistics
    for (const LabeledVector& s : train_set)
        for (int d = 0; d < input_dim; ++d) model.feat_mean[static_cast<std::size_t>(d)] += s.x[static_cast<std::size_t>(d)];
    for (double& m : model.feat_mean) m /= static_cast<double>(train_set.size());
    std::vector<double> var(static_cast<std::size_t>(input_dim), 0.0);
    for (const LabeledVector& s : train_set)
        for (int d = 0; d < input_dim; ++d) {
            const double diff = s.x[static_cast<std::size_t>(d)] - model.feat_mean[static_cast<std::size_t>(d)];
            var[static_cast<std::size_t>(d)] += diff * diff;
        }
    for (int d = 0; d < input_dim; ++d) {
        const double sd = std::sqrt(var[static_cast<std::size_t>(d)] / static_cast<double>(train_set.size()));
        model.feat_scale[static_cast<std::size_t>(d)] = sd > 1e-12 ? sd : 1.0;
    }

    Rng shuffle_rng(Rng::mix(cfg.seed, 0x5a1f7e0dULL));
    TrainResult result;
    result.model = model;
    result.best_test_acc = -1.0;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t idx : order) {
            std::vector<double> y(static_cast<std::size_t>(class_count), 0.0);
            y[static_cast<std::size_t>(train_set[idx].label - 1)] = 1.0;
            train_step(model, train_set[idx].x, y, cfg);
        }
        const double train_acc = accuracy(model, train_set);
        const double test_acc = accuracy(model, test_set);
        result.log.push_back({epoch, train_acc, test_acc});
        if (test_acc > result.best_test_acc) {
            result.best_test_acc = test_acc;
            result.best_epoch = epoch;
            result.model = model;
        }
    }
    return result;
}

}  // namespace hci

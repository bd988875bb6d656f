#include "hci/haar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hci {

namespace {

int scaled(int v, double s) { return static_cast<int>(std::lround(v * s)); }
int scaled_unit(int v, double s) { return std::max(1, static_cast<int>(std::lround(v * s))); }

struct RectSpec {
    int x, y, w, h;
    int sign;  // +1 white, -1 black
};

// Scaled sub-rectangles; units rounded once so the white/black areas balance.
int feature_rects(const HaarFeature& f, const Window& win, RectSpec out[4]) {
    const int X = win.x + scaled(f.x, win.scale);
    const int Y = win.y + scaled(f.y, win.scale);
    switch (f.kind) {
        case HaarKind::TwoRectHorizontal: {
            const int u = scaled_unit(f.w / 2, win.scale), h = scaled_unit(f.h, win.scale);
            out[0] = {X, Y, u, h, +1};
            out[1] = {X + u, Y, u, h, -1};
            return 2;
        }
        case HaarKind::TwoRectVertical: {
            const int w = scaled_unit(f.w, win.scale), u = scaled_unit(f.h / 2, win.scale);
            out[0] = {X, Y, w, u, +1};
            out[1] = {X, Y + u, w, u, -1};
            return 2;
        }
        case HaarKind::ThreeRect: {
            const int u = scaled_unit(f.w / 3, win.scale), h = scaled_unit(f.h, win.scale);
            out[0] = {X, Y, u, h, +1};
            out[1] = {X + u, Y, u, h, -1};
            out[2] = {X + 2 * u, Y, u, h, +1};
            return 3;
        }
        case HaarKind::FourRect: {
            const int uw = scaled_unit(f.w / 2, win.scale), uh = scaled_unit(f.h / 2, win.scale);
            out[0] = {X, Y, uw, uh, +1};
            out[1] = {X + uw, Y, uw, uh, -1};
            out[2] = {X, Y + uh, uw, uh, -1};
            out[3] = {X + uw, Y + uh, uw, uh, +1};
            return 4;
        }
    }
    return 0;
}

}  // namespace

double haar_value(const IntegralImage& ii, const HaarFeature& f, const Window& win, int base_window) {
    RectSpec rects[4];
    const int n = feature_rects(f, win, rects);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const RectSpec& r = rects[i];
        if (r.x < 0 || r.y < 0 || r.x + r.w > ii.width || r.y + r.h > ii.height)
            throw std::out_of_range("haar_value: scaled feature leaves the image");
        acc += r.sign * static_cast<double>(ii.rect_sum(r.x, r.y, r.w, r.h));
    }
    const double side = std::max(1, static_cast<int>(std::lround(base_window * win.scale)));
    return acc / (side * side);
}

std::vector<HaarFeature> enumerate_features(int base_window, int pos_step, int size_step) {
    std::vector<HaarFeature> pool;
    struct KindSpec {
        HaarKind kind;
        int w_unit, h_unit;  // w = w_unit * i, h = h_unit * j
        int w_min, h_min;
    };
    const KindSpec kinds[] = {
        {HaarKind::TwoRectHorizontal, 2, 1, 4, 2},
        {HaarKind::TwoRectVertical, 1, 2, 2, 4},
        {HaarKind::ThreeRect, 3, 1, 6, 2},
        {HaarKind::FourRect, 2, 2, 4, 4},
    };
    for (const auto& k : kinds)
        for (int y = 0; y < base_window; y += pos_step)
            for (int x = 0; x < base_window; x += pos_step)
                for (int h = k.h_min; y + h <= base_window; h += k.h_unit * size_step)
                    for (int w = k.w_min; x + w <= base_window; w += k.w_unit * size_step)
                        pool.push_back({k.kind, x, y, w, h});
    return pool;
}

namespace {

struct StumpFit {
    double threshold = 0.0;
    int polarity = 1;
    double error = 1.0;
};

// Best threshold/polarity for one feature by sweeping the presorted values.
StumpFit fit_stump(const std::vector<float>& values, const std::vector<std::uint32_t>& order,
                   const std::vector<double>& weights, const std::vector<int>& labels, double total_pos,
                   double total_neg) {
    StumpFit best;
    double below_pos = 0.0, below_neg = 0.0;

    auto consider = [&](double threshold) {
        // polarity +1 predicts positive when value < threshold
        const double err_pos_low = below_neg + (total_pos - below_pos);
        // polarity -1 predicts positive when value > threshold
        const double err_pos_high = below_pos + (total_neg - below_neg);
        if (err_pos_low < best.error) best = {threshold, +1, err_pos_low};
        if (err_pos_high < best.error) best = {threshold, -1, err_pos_high};
    };

    consider(static_cast<double>(values[order[0]]) - 1.0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::uint32_t idx = order[i];
        if (labels[idx] > 0)
            below_pos += weights[idx];
        else
            below_neg += weights[idx];
        const double v = values[idx];
        const double next = i + 1 < order.size() ? values[order[i + 1]] : v + 2.0;
        if (next > v) consider((v + next) / 2.0);
    }
    return best;
}

}  // namespace

std::vector<WeakClassifier> train_adaboost(const std::vector<LabeledWindow>& samples, int rounds,
                                           const std::vector<HaarFeature>& pool, int base_window) {
    if (rounds < 1) throw std::invalid_argument("train_adaboost: rounds must be >= 1");
    const std::size_t n = samples.size();
    bool has_pos = false, has_neg = false;
    for (const auto& s : samples) (s.label > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw std::invalid_argument("train_adaboost: both classes must be present");

    std::vector<int> labels(n);
    std::vector<IntegralImage> iis(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (samples[i].image.width != base_window || samples[i].image.height != base_window)
            throw std::invalid_argument("train_adaboost: sample size must equal the base window");
        labels[i] = samples[i].label;
        iis[i] = integral(samples[i].image);
    }

    // Precompute the value matrix and per-feature sort order once.
    const std::size_t nf = pool.size();
    std::vector<std::vector<float>> values(nf, std::vector<float>(n));
    std::vector<std::vector<std::uint32_t>> orders(nf, std::vector<std::uint32_t>(n));
    const Window at_origin{0, 0, 1.0};
    for (std::size_t f = 0; f < nf; ++f) {
        for (std::size_t i = 0; i < n; ++i)
            values[f][i] = static_cast<float>(haar_value(iis[i], pool[f], at_origin, base_window));
        std::iota(orders[f].begin(), orders[f].end(), 0u);
        std::stable_sort(orders[f].begin(), orders[f].end(),
                         [&](std::uint32_t a, std::uint32_t b) { return values[f][a] < values[f][b]; });
    }

    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    std::vector<WeakClassifier> out;
    for (int round = 0; round < rounds; ++round) {
        double total_pos = 0.0, total_neg = 0.0;
        for (std::size_t i = 0; i < n; ++i) (labels[i] > 0 ? total_pos : total_neg) += weights[i];

        std::size_t best_f = 0;
        StumpFit best;
        for (std::size_t f = 0; f < nf; ++f) {
            const StumpFit fit = fit_stump(values[f], orders[f], weights, labels, total_pos, total_neg);
            if (fit.error < best.error) {
                best = fit;
                best_f = f;
            }
        }
        if (best.error >= 0.5) break;  // no stump better than chance

        const double eps = std::clamp(best.error, 1e-10, 1.0 - 1e-10);
        const double alpha = 0.5 * std::log((1.0 - eps) / eps);
        out.push_back({pool[best_f], best.threshold, best.polarity, alpha});

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const int h = best.polarity * values[best_f][i] < best.polarity * best.threshold ? 1 : -1;
            weights[i] *= std::exp(-alpha * labels[i] * h);
            sum += weights[i];
        }
        for (double& w : weights) w /= sum;
    }
    return out;
}

Cascade train_cascade(const std::vector<LabeledWindow>& samples, int rounds, int base_window, int pos_step,
                      int size_step) {
    Cascade c;
    c.base_window = base_window;
    const auto pool = enumerate_features(base_window, pos_step, size_step);
    c.stages.push_back({train_adaboost(samples, rounds, pool, base_window), 0.0});
    return c;
}

bool evaluate_window(const Cascade& cascade, const IntegralImage& ii, const Window& win, double* score) {
    if (cascade.stages.empty()) throw std::invalid_argument("evaluate_window: cascade has no stages");
    double margin = 0.0;
    for (const Stage& stage : cascade.stages) {
        double sum = 0.0;
        for (const WeakClassifier& wc : stage.weak) {
            const double v = haar_value(ii, wc.feature, win, cascade.base_window);
            sum += wc.polarity * v < wc.polarity * wc.threshold ? wc.alpha : -wc.alpha;
        }
        margin = sum - stage.threshold;
        if (margin < 0) {
            if (score) *score = margin;
            return false;
        }
    }
    if (score) *score = margin;
    return true;
}

double iou(const Detection& a, const Detection& b) {
    const int x0 = std::max(a.x, b.x), y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x + a.w, b.x + b.w), y1 = std::min(a.y + a.h, b.y + b.h);
    const double inter = std::max(0, x1 - x0) * static_cast<double>(std::max(0, y1 - y0));
    const double uni = static_cast<double>(a.w) * a.h + static_cast<double>(b.w) * b.h - inter;
    return uni > 0 ? inter / uni : 0.0;
}

std::vector<Detection> detect(const GrayImage& gray, const Cascade& cascade, const DetectParams& params) {
    if (gray.width < cascade.base_window || gray.height < cascade.base_window)
        throw std::invalid_argument("detect: image smaller than the cascade base window");
    const IntegralImage ii = integral(gray);

    std::vector<Detection> raw;
    for (double s = 1.0;; s *= params.scale_factor) {
        const int side = static_cast<int>(std::lround(cascade.base_window * s));
        // rounding the scaled sub-rectangles can overshoot the nominal side by
        // up to 3 px at fractional scales; keep windows clear of the border
        const int reserve = side + (s == 1.0 ? 0 : 3);
        if (reserve > gray.width || reserve > gray.height) break;
        const int step = std::max(1, static_cast<int>(std::lround(params.stride * s)));
        for (int y = 0; y + reserve <= gray.height; y += step) {
            for (int x = 0; x + reserve <= gray.width; x += step) {
                double score = 0.0;
                if (evaluate_window(cascade, ii, {x, y, s}, &score)) raw.push_back({x, y, side, side, score});
            }
        }
    }

    // greedy overlap merge: take the best remaining, drop heavy overlaps
    std::stable_sort(raw.begin(), raw.end(), [](const Detection& a, const Detection& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        return a.w < b.w;
    });
    std::vector<Detection> merged;
    for (const Detection& d : raw) {
        bool overlaps = false;
        for (const Detection& kept : merged)
            if (iou(d, kept) > params.merge_iou) {
                overlaps = true;
                break;
            }
        if (!overlaps) merged.push_back(d);
    }
    return merged;
}

std::vector<Detection> detect(const Frame& frame, const Cascade& cascade, const DetectParams& params) {
    return detect(to_gray(frame), cascade, params);
}

namespace {

double candidate_score(const Component& c, const GrayImage& gray, const Cascade& cascade, bool* passed) {
    const int x = std::clamp(c.x, 0, gray.width - 1);
    const int y = std::clamp(c.y, 0, gray.height - 1);
    const int w = std::clamp(c.w, 1, gray.width - x);
    const int h = std::clamp(c.h, 1, gray.height - y);
    const GrayImage patch = resize_nearest(crop(gray, x, y, w, h), cascade.base_window, cascade.base_window);
    double score = 0.0;
    *passed = evaluate_window(cascade, integral(patch), {0, 0, 1.0}, &score);
    return score;
}

}  // namespace

std::optional<FaceHand> pick_face(const Component& a, const Component& b, const GrayImage& gray,
                                  const Cascade& cascade) {
    bool pass_a = false, pass_b = false;
    const double score_a = candidate_score(a, gray, cascade, &pass_a);
    const double score_b = candidate_score(b, gray, cascade, &pass_b);
    if (!pass_a && !pass_b) return std::nullopt;

    bool a_is_face;
    if (pass_a != pass_b) {
        a_is_face = pass_a;
    } else if (score_a != score_b) {
        a_is_face = score_a > score_b;
    } else if (a.area != b.area) {
        a_is_face = a.area > b.area;
    } else {
        a_is_face = true;
    }
    FaceHand fh;
    fh.face = a_is_face ? a : b;
    fh.hand = a_is_face ? b : a;
    fh.face_score = a_is_face ? score_a : score_b;
    return fh;
}

namespace {

const char* kind_token(HaarKind k) {
    switch (k) {
        case HaarKind::TwoRectHorizontal: return "two-h";
        case HaarKind::TwoRectVertical: return "two-v";
        case HaarKind::ThreeRect: return "three-h";
        case HaarKind::FourRect: return "four";
    }
    return "?";
}

HaarKind parse_kind(const std::string& tok) {
    if (tok == "two-h") return HaarKind::TwoRectHorizontal;
    if (tok == "two-v") return HaarKind::TwoRectVertical;
    if (tok == "three-h") return HaarKind::ThreeRect;
    if (tok == "four") return HaarKind::FourRect;
    throw std::runtime_error("cascade file: unknown feature kind '" + tok + "'");
}

}  // namespace

void save_cascade(const Cascade& cascade, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.precision(17);
    out << "haarcascade v1\n";
    out << "window " << cascade.base_window << "\n";
    out << "stages " << cascade.stages.size() << "\n";
    for (const Stage& stage : cascade.stages) {
        out << "stage " << stage.threshold << " " << stage.weak.size() << "\n";
        for (const WeakClassifier& wc : stage.weak)
            out << "weak " << kind_token(wc.feature.kind) << " " << wc.feature.x << " " << wc.feature.y << " "
                << wc.feature.w << " " << wc.feature.h << " " << wc.threshold << " " << wc.polarity << " "
                << wc.alpha << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Cascade load_cascade(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cascade file " + path);
    auto fail = [&](const std::string& why) -> std::runtime_error {
        return std::runtime_error("cascade file " + path + ": " + why);
    };
    std::string line;
    if (!std::getline(in, line) || line != "haarcascade v1") throw fail("bad magic line");

    Cascade c;
    std::size_t n_stages = 0;
    std::string word;
    in >> word;
    if (word != "window" || !(in >> c.base_window) || c.base_window < 4) throw fail("bad window line");
    in >> word;
    if (word != "stages" || !(in >> n_stages) || n_stages < 1) throw fail("bad stages line");
    for (std::size_t s = 0; s < n_stages; ++s) {
        Stage stage;
        std::size_t n_weak = 0;
        in >> word;
        if (word != "stage" || !(in >> stage.threshold >> n_weak) || n_weak < 1) throw fail("bad stage line");
        for (std::size_t i = 0; i < n_weak; ++i) {
            WeakClassifier wc;
            std::string kind;
            in >> word >> kind;
            if (word != "weak" ||
                !(in >> wc.feature.x >> wc.feature.y >> wc.feature.w >> wc.feature.h >> wc.threshold >>
                  wc.polarity >> wc.alpha))
                throw fail("bad weak line");
            wc.feature.kind = parse_kind(kind);
            if (wc.polarity != 1 && wc.polarity != -1) throw fail("polarity must be +1/-1");
            stage.weak.push_back(wc);
        }
        c.stages.push_back(std::move(stage));
    }
    return c;
}

}  // namespace hci

#include "hci/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hci/rng.hpp"

namespace hci {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Finger {
    double angle_deg;  // 0 = +x, 90 = up
    double length;
    double width;
};

struct GestureShape {
    double palm_radius;
    std::vector<Finger> fingers;
};

// Each class has three sub-variants sharing the protrusion count; variants of
// different classes interleave in hull-feature space and each variant carries
// its own pose offset, which is what makes the expert split earn its keep.
GestureShape base_shape(int gesture_class, int variant) {
    switch (gesture_class) {
        case 1: {
            if (variant == 1) return {25.0, {{20, 9, 12}}};
            if (variant == 2) return {25.0, {{160, 9, 12}}};
            return {26.0, {}};
        }
        case 2: {
            if (variant == 1) return {20.0, {{62, 27, 13}}};
            if (variant == 2) return {20.0, {{118, 27, 13}}};
            return {20.0, {{90, 27, 13}}};
        }
        case 3: {
            if (variant == 1) return {20.0, {{55, 26, 12}, {100, 26, 12}}};
            if (variant == 2) return {20.0, {{80, 26, 12}, {125, 26, 12}}};
            return {20.0, {{72, 27, 12}, {108, 27, 12}}};
        }
        case 4: {
            if (variant == 1) return {20.0, {{74, 24, 11}, {95, 27, 11}, {116, 24, 11}}};
            if (variant == 2) return {20.0, {{52, 25, 12}, {84, 28, 12}, {116, 25, 12}}};
            return {20.0, {{60, 25, 12}, {90, 28, 12}, {120, 25, 12}}};
        }
        case 5: {
            if (variant == 1) return {19.0, {{62, 23, 10}, {85, 26, 10}, {108, 26, 10}, {131, 23, 10}}};
            if (variant == 2) return {19.0, {{46, 23, 10}, {70, 26, 10}, {94, 26, 10}, {118, 23, 10}}};
            return {19.0, {{48, 23, 11}, {76, 26, 11}, {104, 26, 11}, {132, 23, 11}}};
        }
        default: throw std::invalid_argument("gesture class must be 1..5");
    }
}

double dist_to_segment(double px, double py, double ax, double ay, double bx, double by) {
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

BinaryMask render_gesture(int gesture_class, std::uint64_t seed, int canvas) {
    Rng rng(Rng::mix(seed, 0x6e5701eULL));
    const int variant = static_cast<int>(rng.below(3));
    const int pose = static_cast<int>(rng.below(3));  // independent of the shape variant
    GestureShape shape = base_shape(gesture_class, variant);
    const double rot = ((pose - 1) * 9.0 + rng.uniform(-1.0, 1.0)) * kPi / 180.0;
    const double scale = rng.uniform(0.8, 1.2);
    const double palm_aspect = rng.uniform(0.85, 1.15);  // ellipse nuisance axis
    const double cx = canvas / 2.0 + rng.uniform(-2.0, 2.0);
    const double cy = canvas * 0.58 + rng.uniform(-2.0, 2.0);
    const double palm_r = shape.palm_radius * scale * rng.uniform(0.94, 1.06);
    const double root = palm_r * rng.uniform(0.38, 0.58);  // finger base ring
    const double ph1 = rng.uniform(0.0, 2.0 * kPi), ph2 = rng.uniform(0.0, 2.0 * kPi);
    const double ph3 = rng.uniform(0.0, 2.0 * kPi), ph4 = rng.uniform(0.0, 2.0 * kPi);
    const double a3 = rng.uniform(0.02, 0.06), a5 = rng.uniform(0.015, 0.05);

    struct Capsule {
        double ax, ay, bx, by, radius;
    };
    std::vector<Capsule> capsules;
    for (const Finger& f : shape.fingers) {
        const double jitter = rng.uniform(-3.0, 3.0);
        const double theta = (f.angle_deg + jitter) * kPi / 180.0 + rot;
        const double len = f.length * scale * rng.uniform(0.86, 1.10);  // independent per finger
        const double width = f.width * scale + rng.uniform(-1.2, 1.2);
        const double dx = std::cos(theta), dy = -std::sin(theta);  // image y grows down
        capsules.push_back({cx + dx * root, cy + dy * root, cx + dx * (root + len), cy + dy * (root + len),
                            std::max(2.0, width / 2.0)});
    }

    BinaryMask mask(canvas, canvas);
    for (int y = 0; y < canvas; ++y) {
        for (int x = 0; x < canvas; ++x) {
            const double dx = (x - cx) / palm_aspect, dy = y - cy;
            const double theta = std::atan2(dy, dx);
            const double wobble = 1.0 + a3 * std::sin(3.0 * theta + ph1) + a5 * std::sin(5.0 * theta + ph2) +
                                  0.03 * std::sin(2.0 * theta + ph3) + 0.02 * std::sin(7.0 * theta + ph4);
            bool inside = dx * dx + dy * dy <= (palm_r * wobble) * (palm_r * wobble);
            for (const Capsule& c : capsules) {
                if (inside) break;
                inside = dist_to_segment(x, y, c.ax, c.ay, c.bx, c.by) <= c.radius;
            }
            if (inside) mask.set(x, y, true);
        }
    }

    return mask;
}

GestureDataset synth_gestures(int per_class, std::uint64_t seed) {
    if (per_class < 1) throw std::invalid_argument("synth_gestures: per_class must be >= 1");
    GestureDataset ds;
    for (int i = 0; i < per_class; ++i) {
        for (int cls = 1; cls <= kGestureClasses; ++cls) {
            ds.masks.push_back(render_gesture(cls, Rng::mix(seed, std::uint64_t(i) * 16 + cls)));
            ds.labels.push_back(cls);
        }
    }
    return ds;
}

FaceSpec identity_spec(int identity) {
    switch (identity) {
        case 1: return {0.26, 0.10, 0.30, 0.74, 0.66};
        case 2: return {0.34, 0.18, 0.00, 0.92, 0.72};
        case 3: return {0.42, 0.12, 0.18, 0.84, 0.80};
        case 4: return {0.30, 0.20, 0.00, 0.98, 0.76};
        case 5: return {0.38, 0.14, 0.40, 0.78, 0.70};
        default: throw std::invalid_argument("identity must be 1..5");
    }
}

namespace {

std::uint8_t clamp_channel(double v) { return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)); }

Rgb scaled_skin(double luma_factor, double noise) {
    return {clamp_channel(kSkinBase.r * luma_factor + noise), clamp_channel(kSkinBase.g * luma_factor + noise),
            clamp_channel(kSkinBase.b * luma_factor + noise)};
}

// Luma factor of the face pattern at oval-relative coordinates (u, v in
// [-1, 1] of the semi-axes); < 0 means outside the oval. The spec fractions
// are given for the reference layout (oval spanning [0.04, 0.96] of a canvas)
// and are mapped to oval-local rows here so every renderer agrees.
double face_luma_factor(const FaceSpec& spec, double u, double v) {
    if (u * u + v * v > 1.0) return -1.0;
    const double row = 0.04 + (v + 1.0) * 0.5 * 0.92;  // canvas fraction in the reference layout
    if (row >= spec.eye_row && row < spec.eye_row + spec.band_h) {
        // bright gap splits the band into two eyes
        if (spec.eye_gap > 0 && std::abs(u) < spec.eye_gap) return 1.0;
        if (std::abs(u) > 0.85) return 1.0;  // temples stay bright
        return 0.42;
    }
    if (row >= spec.mouth_row && row < spec.mouth_row + 0.06 && std::abs(u) < 0.45) return 0.66;
    return 1.0;
}

}  // namespace

Frame render_face_canvas(const FaceSpec& spec, int side, std::uint64_t seed, Rgb bg, double shift_jitter,
                         double scale_jitter, double noise_sigma) {
    Rng rng(Rng::mix(seed, 0xfacecafeULL));
    const double scale = 1.0 + (scale_jitter > 0 ? rng.uniform(-scale_jitter, scale_jitter) : 0.0);
    const double jx = shift_jitter > 0 ? rng.uniform(-shift_jitter, shift_jitter) : 0.0;
    const double jy = shift_jitter > 0 ? rng.uniform(-shift_jitter, shift_jitter) : 0.0;
    const double cx = side / 2.0 + jx, cy = side / 2.0 + jy;
    const double semi_y = 0.46 * side * scale;
    const double semi_x = semi_y * spec.oval_aspect;

    Frame out(side, side, bg);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const double noise = rng.normal(0.0, noise_sigma);
            const double u = (x - cx) / semi_x, v = (y - cy) / semi_y;
            const double f = face_luma_factor(spec, u, v);
            if (f < 0) {
                const Rgb base = out.at(x, y);
                out.set(x, y, {clamp_channel(base.r + noise), clamp_channel(base.g + noise),
                               clamp_channel(base.b + noise)});
            } else {
                out.set(x, y, scaled_skin(f, noise));
            }
        }
    }
    return out;
}

GrayImage render_face_patch(const FaceSpec& spec, int side, std::uint64_t seed, bool randomize_bg) {
    Rng rng(Rng::mix(seed, 0xbac6ULL));
    Rgb bg = kSceneBg;
    if (randomize_bg) {
        const double f = rng.uniform(0.5, 1.4);
        bg = {clamp_channel(kSceneBg.r * f), clamp_channel(kSceneBg.g * f), clamp_channel(kSceneBg.b * f)};
    }
    return to_gray(render_face_canvas(spec, side, rng.next_u64(), bg, side * 0.04, 0.07));
}

std::vector<LabeledWindow> synth_cascade_samples(int positives, int negatives, std::uint64_t seed, int window) {
    std::vector<LabeledWindow> samples;
    for (int i = 0; i < positives; ++i) {
        const int identity = 1 + i % kIdentityCount;
        samples.push_back({render_face_patch(identity_spec(identity), window, Rng::mix(seed, 7000 + i), true), +1});
    }
    for (int i = 0; i < negatives; ++i) {
        Rng rng(Rng::mix(seed, 90000 + i));
        GrayImage img(window, window);
        switch (i % 5) {
            case 0: {  // flat skin-toned blob, hand-like
                const double lum = rng.uniform(120.0, 150.0);
                const double r = rng.uniform(0.3, 0.5) * window;
                const double cx = window / 2.0 + rng.uniform(-3, 3), cy = window / 2.0 + rng.uniform(-3, 3);
                for (int y = 0; y < window; ++y)
                    for (int x = 0; x < window; ++x) {
                        const bool in = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r;
                        img.set(x, y, clamp_channel((in ? lum : rng.uniform(50, 140)) + rng.normal(0, 4)));
                    }
                break;
            }
            case 1: {  // plain oval, no eye band
                FaceSpec blank = identity_spec(1 + static_cast<int>(rng.below(kIdentityCount)));
                blank.band_h = 0.0;
                blank.mouth_row = 2.0;  // pushes the mouth outside the oval
                img = render_face_patch(blank, window, rng.next_u64(), true);
                break;
            }
            case 2: {  // uniform noise
                for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
                break;
            }
            case 3: {  // gradient
                const double gx = rng.uniform(-4, 4), gy = rng.uniform(-4, 4), base = rng.uniform(60, 180);
                for (int y = 0; y < window; ++y)
                    for (int x = 0; x < window; ++x)
                        img.set(x, y, clamp_channel(base + gx * x + gy * y + rng.normal(0, 6)));
                break;
            }
            default: {  // background-like flat noise
                const double base = rng.uniform(60, 150);
                for (auto& p : img.pixels) p = clamp_channel(base + rng.normal(0, 6));
                break;
            }
        }
        samples.push_back({std::move(img), -1});
    }
    return samples;
}

std::vector<std::pair<int, GrayImage>> synth_identity_faces(int per_identity, std::uint64_t seed, int side) {
    std::vector<std::pair<int, GrayImage>> out;
    for (int id = 1; id <= kIdentityCount; ++id)
        for (int i = 0; i < per_identity; ++i) {
            const Frame canvas = render_face_canvas(identity_spec(id), side, Rng::mix(seed, id * 1000 + i),
                                                    kSceneBg, side * 0.04, 0.07);
            out.emplace_back(id, to_gray(canvas));
        }
    return out;
}

PlacedFace synth_detection_frame(std::uint64_t seed, int frame_side) {
    Rng rng(Rng::mix(seed, 0xdefefULL));
    PlacedFace pf;
    pf.image = GrayImage(frame_side, frame_side);
    const double bg_luma = to_gray(Frame(1, 1, kSceneBg)).at(0, 0);
    for (auto& p : pf.image.pixels)
        p = static_cast<std::uint8_t>(std::clamp(bg_luma + rng.normal(0.0, 4.0), 0.0, 255.0));

    const int side = 24 + static_cast<int>(rng.below(33));  // 24..56
    const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(frame_side - side + 1)));
    const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(frame_side - side + 1)));
    const int identity = 1 + static_cast<int>(rng.below(kIdentityCount));
    const GrayImage patch = to_gray(render_face_canvas(identity_spec(identity), side, rng.next_u64(), kSceneBg,
                                                       side * 0.02, 0.04));
    for (int j = 0; j < side; ++j)
        for (int i = 0; i < side; ++i) pf.image.set(x + i, y + j, patch.at(i, j));
    pf.truth = {x, y, side, side, 0.0};
    return pf;
}

SceneFrames render_scene(const SceneSpec& spec) {
    if (spec.hand_path.empty()) throw std::invalid_argument("render_scene: empty hand path");
    SceneFrames out;
    out.gesture_class = spec.gesture_class;
    out.identity = spec.identity;
    out.arrival_frame = spec.arrival_frame;
    out.face_cx = spec.face_cx;
    out.face_cy = spec.face_cy;
    const double semi_y = 0.46 * spec.face_side;
    const double semi_x = semi_y * identity_spec(spec.identity).oval_aspect;
    out.face_w = 2.0 * semi_x;
    out.face_h = 2.0 * semi_y;

    // one silhouette instance held through the whole episode
    const BinaryMask shape = resize_nearest(render_gesture(spec.gesture_class, spec.seed), spec.hand_size,
                                            spec.hand_size);
    double sum_x = 0, sum_y = 0;
    std::int64_t n_fg = 0;
    for (int y = 0; y < shape.height; ++y)
        for (int x = 0; x < shape.width; ++x)
            if (shape.get(x, y)) {
                sum_x += x;
                sum_y += y;
                ++n_fg;
            }
    const double centroid_x = sum_x / std::max<std::int64_t>(1, n_fg);
    const double centroid_y = sum_y / std::max<std::int64_t>(1, n_fg);

    const FaceSpec face = identity_spec(spec.identity);

    for (std::size_t f = 0; f < spec.hand_path.size(); ++f) {
        Rng rng(Rng::mix(spec.seed, 0x50000 + f));
        Frame frame(spec.width, spec.height, kSceneBg);

        // background noise
        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x) {
                const double noise = rng.normal(0.0, spec.noise_sigma);
                const Rgb base = frame.at(x, y);
                frame.set(x, y, {clamp_channel(base.r + noise), clamp_channel(base.g + noise),
                                 clamp_channel(base.b + noise)});
            }

        // face oval
        const int fx0 = std::max(0, int(spec.face_cx - semi_x - 1)), fx1 = std::min(spec.width - 1, int(spec.face_cx + semi_x + 1));
        const int fy0 = std::max(0, int(spec.face_cy - semi_y - 1)), fy1 = std::min(spec.height - 1, int(spec.face_cy + semi_y + 1));
        for (int y = fy0; y <= fy1; ++y)
            for (int x = fx0; x <= fx1; ++x) {
                const double u = (x - spec.face_cx) / semi_x, v = (y - spec.face_cy) / semi_y;
                const double lf = face_luma_factor(face, u, v);
                if (lf >= 0) frame.set(x, y, scaled_skin(lf, rng.normal(0.0, spec.noise_sigma)));
            }

        // hand silhouette at the scripted center
        const auto [hx, hy] = spec.hand_path[f];
        const int ox = static_cast<int>(std::lround(hx - shape.width / 2.0));
        const int oy = static_cast<int>(std::lround(hy - shape.height / 2.0));
        for (int y = 0; y < shape.height; ++y)
            for (int x = 0; x < shape.width; ++x) {
                if (!shape.get(x, y)) continue;
                const int px = ox + x, py = oy + y;
                if (frame.in_bounds(px, py))
                    frame.set(px, py, scaled_skin(0.97, rng.normal(0.0, spec.noise_sigma)));
            }

        out.hand_centers.emplace_back(ox + centroid_x, oy + centroid_y);
        out.frames.push_back(std::move(frame));
    }
    return out;
}

SceneSpec make_episode_spec(int gesture_class, int identity, std::uint64_t seed) {
    SceneSpec spec;
    spec.gesture_class = gesture_class;
    spec.identity = identity;
    spec.seed = seed;

    const double hold_x = 84.0, hold_y = 76.0;
    const double start_x = 160.0, start_y = 118.0;
    const int vertical_frames = 18;  // descend along x = start_x
    const int dash_frames = 12;      // sweep left to the hold point
    const int hold_frames = 14;

    for (int t = 0; t < vertical_frames; ++t) {
        const double a = vertical_frames > 1 ? double(t) / (vertical_frames - 1) : 1.0;
        spec.hand_path.emplace_back(start_x, start_y + a * (hold_y - start_y));
    }
    for (int t = 1; t <= dash_frames; ++t) {
        const double a = double(t) / dash_frames;
        spec.hand_path.emplace_back(start_x + a * (hold_x - start_x), hold_y);
    }
    spec.arrival_frame = vertical_frames + dash_frames - 1;
    for (int t = 0; t < hold_frames; ++t) spec.hand_path.emplace_back(hold_x, hold_y);
    return spec;
}

SceneSpec make_smoke_spec(int gesture_class, int identity, std::uint64_t seed) {
    SceneSpec spec;
    spec.gesture_class = gesture_class;
    spec.identity = identity;
    spec.seed = seed;
    spec.arrival_frame = 0;
    for (int t = 0; t < 10; ++t) spec.hand_path.emplace_back(84.0, 76.0);
    return spec;
}

}  // namespace hci

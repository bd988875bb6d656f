#include "hci/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "hci/gesture.hpp"
#include "hci/rng.hpp"
#include "hci/segmentation.hpp"

namespace hci {

const char* stage_name(PipelineStage s) {
    switch (s) {
        case PipelineStage::Detecting: return "detecting";
        case PipelineStage::Tracking: return "tracking";
        case PipelineStage::Recognizing: return "recognizing";
        case PipelineStage::Acting: return "acting";
    }
    return "?";
}

const char* command_name(Command c) {
    switch (c) {
        case Command::Stop: return "stop";
        case Command::Play: return "play";
        case Command::Next: return "next";
        case Command::VolumeUp: return "volume_up";
        case Command::VolumeDown: return "volume_down";
    }
    return "?";
}

Command map_command(int gesture_class) {
    switch (gesture_class) {
        case 1: return Command::Stop;
        case 2: return Command::Play;
        case 3: return Command::Next;
        case 4: return Command::VolumeUp;
        case 5: return Command::VolumeDown;
        default: throw std::invalid_argument("map_command: gesture class must be 1..5");
    }
}

Pipeline::Pipeline(const PipelineConfig& cfg, const PipelineModels& models) : cfg_(cfg), models_(models) {}

void Pipeline::reset_to_detecting(const char* why, FrameTrace& tr) {
    stage_ = PipelineStage::Detecting;
    particles_.reset();
    votes_.clear();
    face_miss_ = 0;
    cooldown_ = 0;
    tr.note = why;
}

void Pipeline::run_detecting(const Frame& frame, const GrayImage& gray, FrameTrace& tr) {
    const BinaryMask skin = skin_mask(frame, cfg_.skin);
    const BinaryMask cleaned = fill_holes(dilate(erode(skin, cfg_.erode_radius), cfg_.dilate_radius));
    const auto comps = label_components(cleaned);
    const auto min_area = static_cast<std::int64_t>(cfg_.min_area_frac * frame.width * frame.height);
    const auto candidates = select_candidates(comps, min_area);
    if (!candidates) {
        tr.note = "not_enough_candidates";
        return;
    }
    const auto picked = pick_face(candidates->first, candidates->second, gray, models_.cascade);
    if (!picked) {
        tr.note = "face_not_verified";
        return;
    }
    face_box_ = {picked->face.x, picked->face.y, picked->face.w, picked->face.h, picked->face_score};
    face_miss_ = 0;
    particles_ = init_particles(picked->hand, frame, cfg_.tracker.particle_count,
                                Rng::mix(cfg_.seed, 0x1000 + static_cast<std::uint64_t>(frame_index_)),
                                cfg_.tracker);
    stage_ = PipelineStage::Tracking;
    tr.face_x = face_box_.x + face_box_.w / 2.0;
    tr.face_y = face_box_.y + face_box_.h / 2.0;
    tr.face_w = face_box_.w;
    tr.hand_x = picked->hand.cx;
    tr.hand_y = picked->hand.cy;
    tr.note = "initialized";
}

bool Pipeline::redetect_face(const GrayImage& gray, FrameTrace& tr) {
    const int grow_x = std::max(8, face_box_.w / 2);
    const int grow_y = std::max(8, face_box_.h / 2);
    const int x0 = std::max(0, face_box_.x - grow_x);
    const int y0 = std::max(0, face_box_.y - grow_y);
    const int x1 = std::min(gray.width, face_box_.x + face_box_.w + grow_x);
    const int y1 = std::min(gray.height, face_box_.y + face_box_.h + grow_y);

    bool found = false;
    if (x1 - x0 >= models_.cascade.base_window && y1 - y0 >= models_.cascade.base_window) {
        const GrayImage region = crop(gray, x0, y0, x1 - x0, y1 - y0);
        // finer scale steps than the full-frame default: the box width feeds the
        // trigger threshold, so coarse scale quantization would make it jumpy
        DetectParams params;
        params.scale_factor = 1.12;
        const auto dets = detect(region, models_.cascade, params);
        if (!dets.empty()) {
            face_box_ = {dets[0].x + x0, dets[0].y + y0, dets[0].w, dets[0].h, dets[0].score};
            face_miss_ = 0;
            found = true;
        }
    }
    if (!found) {
        ++face_miss_;
        if (face_miss_ > cfg_.face_miss_max) {
            reset_to_detecting("face_lost", tr);
            return false;
        }
        tr.note = "face_carried";
    }
    tr.face_x = face_box_.x + face_box_.w / 2.0;
    tr.face_y = face_box_.y + face_box_.h / 2.0;
    tr.face_w = face_box_.w;
    return true;
}

void Pipeline::run_recognition(const Frame& frame, const GrayImage& gray, FrameTrace& tr) {
    // raw skin mask keeps finger structure that disk erosion would destroy;
    // the roi is padded beyond the tracked bbox so an off-center estimate
    // cannot clip fingers, and the largest component inside it is kept
    const BinaryMask skin = skin_mask(frame, cfg_.skin);
    const int bw = static_cast<int>(std::lround(particles_->bbox_w * 1.6));
    const int bh = static_cast<int>(std::lround(particles_->bbox_h * 1.6));
    const int rx = std::clamp(static_cast<int>(std::lround(tr.hand_x - bw / 2.0)), 0, frame.width - 1);
    const int ry = std::clamp(static_cast<int>(std::lround(tr.hand_y - bh / 2.0)), 0, frame.height - 1);
    const int rw = std::min(bw, frame.width - rx);
    const int rh = std::min(bh, frame.height - ry);

    int vote = 0;
    try {
        const BinaryMask region = crop(skin, rx, ry, rw, rh);
        std::vector<std::int32_t> labels;
        const auto comps = label_components(region, &labels);
        if (comps.empty()) throw std::runtime_error("no foreground");
        BinaryMask hand_only(region.width, region.height);
        for (std::size_t i = 0; i < labels.size(); ++i)
            hand_only.bits[i] = labels[i] == comps[0].label ? 1 : 0;
        const BinaryMask gesture = normalize_gesture(hand_only, comps[0]);
        const GestureFeatureVector fv = gesture_vector(gesture);
        const Classification cls = classify(models_.moe, std::vector<double>(fv.begin(), fv.end()));
        vote = cls.label;
        last_confidence_ = cls.confidence;
    } catch (const std::exception&) {
        tr.note = "empty_hand_crop";
        return;
    }
    tr.vote_class = vote;
    votes_.push_back(vote);
    if (static_cast<int>(votes_.size()) > cfg_.vote_frames) votes_.pop_front();
    if (static_cast<int>(votes_.size()) < cfg_.vote_frames) return;

    // majority over the window
    int best_class = 0, best_count = 0;
    for (int cls = 1; cls <= models_.moe.class_count; ++cls) {
        const int count = static_cast<int>(std::count(votes_.begin(), votes_.end(), cls));
        if (count > best_count) {
            best_count = count;
            best_class = cls;
        }
    }
    if (best_count * 2 <= cfg_.vote_frames) return;  // no majority yet, window keeps sliding

    // viewer verification gates the event
    const int fx = std::clamp(face_box_.x, 0, gray.width - 1);
    const int fy = std::clamp(face_box_.y, 0, gray.height - 1);
    const int fw = std::clamp(face_box_.w, 1, gray.width - fx);
    const int fh = std::clamp(face_box_.h, 1, gray.height - fy);
    const GrayImage face_patch =
        resize_nearest(crop(gray, fx, fy, fw, fh), models_.pca.face_w, models_.pca.face_h);
    const std::optional<int> identity = verify(face_patch, models_.pca, models_.gallery);

    votes_.clear();
    stage_ = PipelineStage::Acting;
    cooldown_ = cfg_.cooldown_frames;
    if (!identity) {
        tr.note = "identity_rejected";
        return;
    }
    ControlEvent ev;
    ev.frame = frame_index_;
    ev.gesture_class = best_class;
    ev.command = map_command(best_class);
    ev.confidence = last_confidence_;
    ev.identity = *identity;
    events_.push_back(ev);
    tr.event_emitted = true;
}

FrameTrace Pipeline::process(const Frame& frame) {
    ++frame_index_;
    FrameTrace tr;
    tr.frame = frame_index_;
    tr.stage_before = stage_;

    try {
        const GrayImage gray = to_gray(frame);
        if (stage_ == PipelineStage::Detecting) {
            run_detecting(frame, gray, tr);
        } else {
            const PipelineStage entered = stage_;
            if (redetect_face(gray, tr)) {
                const auto estimate =
                    step(*particles_, frame,
                         Rng::mix(cfg_.seed, 0x2000 + static_cast<std::uint64_t>(frame_index_)));
                if (!estimate) {
                    reset_to_detecting("target_lost", tr);
                } else {
                    tr.hand_x = estimate->first;
                    tr.hand_y = estimate->second;
                    tr.distance = center_distance(tr.face_x, tr.face_y, tr.hand_x, tr.hand_y);
                    tr.threshold = cfg_.trigger_multiplier * face_box_.w;
                    if (entered == PipelineStage::Acting) {
                        if (--cooldown_ <= 0) {
                            stage_ = PipelineStage::Tracking;
                            votes_.clear();
                        }
                    } else {
                        const Trigger trig = check_trigger(tr.distance, TriggerConfig{tr.threshold});
                        tr.trigger = trig == Trigger::Proceed ? 'P' : 'S';
                        if (entered == PipelineStage::Tracking && trig == Trigger::Proceed) {
                            stage_ = PipelineStage::Recognizing;
                            votes_.clear();
                        }
                        if (stage_ == PipelineStage::Recognizing) {
                            if (trig == Trigger::Stay) {
                                stage_ = PipelineStage::Tracking;
                                votes_.clear();
                                tr.note = "trigger_lapsed";
                            } else {
                                run_recognition(frame, gray, tr);
                            }
                        }
                    }
                }
            }
        }
    } catch (const std::exception& e) {
        reset_to_detecting("error_reset", tr);
        tr.note = std::string("error_reset: ") + e.what();
    }
    tr.stage_after = stage_;
    return tr;
}

PipelineResult run_pipeline(const std::vector<Frame>& frames, const PipelineConfig& cfg,
                            const PipelineModels& models) {
    Pipeline pipe(cfg, models);
    PipelineResult result;
    for (const Frame& frame : frames) result.trace.push_back(pipe.process(frame));
    result.events = pipe.events();
    return result;
}

}  // namespace hci

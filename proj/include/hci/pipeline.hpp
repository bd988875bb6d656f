#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "hci/config.hpp"
#include "hci/haar.hpp"
#include "hci/image.hpp"
#include "hci/moe.hpp"
#include "hci/pca.hpp"
#include "hci/tracking.hpp"

namespace hci {

enum class PipelineStage { Detecting, Tracking, Recognizing, Acting };
const char* stage_name(PipelineStage s);

enum class Command { Stop, Play, Next, VolumeUp, VolumeDown };
const char* command_name(Command c);

/// Fixed gesture-to-command map: G1 Stop, G2 Play, G3 Next, G4 VolumeUp,
/// G5 VolumeDown.
Command map_command(int gesture_class);

struct ControlEvent {
    int frame = 0;
    int gesture_class = 0;  // 1..5
    Command command = Command::Stop;
    double confidence = 0.0;
    int identity = 0;  // verified viewer id (events require a verified identity)
};

struct FrameTrace {
    int frame = 0;
    PipelineStage stage_before = PipelineStage::Detecting;
    PipelineStage stage_after = PipelineStage::Detecting;
    double face_x = -1, face_y = -1, face_w = 0;  // tracked face box center/width
    double hand_x = -1, hand_y = -1;              // particle estimate
    double distance = -1;                         // face-hand center distance
    double threshold = -1;
    char trigger = '-';      // 'P' proceed, 'S' stay, '-' not evaluated
    int vote_class = 0;      // this frame's classification, 0 = none
    bool event_emitted = false;
    std::string note;
};

struct PipelineModels {
    Cascade cascade;
    MoEModel moe;
    PcaModel pca;
    Gallery gallery;
};

struct PipelineResult {
    std::vector<ControlEvent> events;
    std::vector<FrameTrace> trace;
};

/// Stage 1-4 state machine over a frame stream. Transitions:
/// Detecting -> Tracking (two candidates and a cascade-verified face),
/// Tracking -> Recognizing (distance trigger), Recognizing -> Acting (majority
/// vote emitted), Acting -> Tracking (cooldown elapsed), anything -> Detecting
/// on target/face loss. Deterministic for fixed frames, config and models.
class Pipeline {
public:
    Pipeline(const PipelineConfig& cfg, const PipelineModels& models);

    FrameTrace process(const Frame& frame);

    PipelineStage stage() const { return stage_; }
    const std::vector<ControlEvent>& events() const { return events_; }

private:
    void reset_to_detecting(const char* why, FrameTrace& tr);
    bool redetect_face(const GrayImage& gray, FrameTrace& tr);
    void run_detecting(const Frame& frame, const GrayImage& gray, FrameTrace& tr);
    void run_recognition(const Frame& frame, const GrayImage& gray, FrameTrace& tr);

    const PipelineConfig cfg_;
    const PipelineModels& models_;

    PipelineStage stage_ = PipelineStage::Detecting;
    int frame_index_ = -1;
    std::optional<ParticleSet> particles_;
    Detection face_box_{};
    int face_miss_ = 0;
    int cooldown_ = 0;
    std::deque<int> votes_;
    std::vector<ControlEvent> events_;
    double last_confidence_ = 0.0;
};

PipelineResult run_pipeline(const std::vector<Frame>& frames, const PipelineConfig& cfg,
                            const PipelineModels& models);

}  // namespace hci

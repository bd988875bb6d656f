#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hci/config.hpp"
#include "hci/eval.hpp"
#include "hci/gesture.hpp"
#include "hci/haar.hpp"
#include "hci/image.hpp"
#include "hci/model_io.hpp"
#include "hci/moe.hpp"
#include "hci/pca.hpp"
#include "hci/pipeline.hpp"
#include "hci/rng.hpp"
#include "hci/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

std::vector<std::pair<std::string, std::string>> read_labels_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open labels file " + path.string());
    std::vector<std::pair<std::string, std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError("bad labels line in " + path.string() + ": " + line);
        std::string a = line.substr(0, comma), b = line.substr(comma + 1);
        if (!b.empty() && b.back() == '\r') b.pop_back();
        if (first && (b == "label" || b == "identity")) {
            first = false;
            continue;  // header
        }
        first = false;
        rows.emplace_back(a, b);
    }
    return rows;
}

std::vector<hci::LabeledVector> load_gesture_dataset(const fs::path& dir) {
    std::vector<hci::LabeledVector> data;
    for (const auto& [file, label] : read_labels_csv(dir / "labels.csv")) {
        const hci::GrayImage g = hci::read_gray_pnm((dir / file).string());
        const hci::BinaryMask mask = hci::gray_to_mask(g);
        const auto fv = hci::gesture_vector(hci::normalize_gesture(mask));
        data.push_back({std::vector<double>(fv.begin(), fv.end()), std::stoi(label)});
    }
    if (data.empty()) throw DataError("no samples in " + dir.string());
    return data;
}

std::vector<hci::LabeledVector> features_from_masks(const hci::GestureDataset& ds) {
    std::vector<hci::LabeledVector> data;
    for (std::size_t i = 0; i < ds.masks.size(); ++i) {
        const auto fv = hci::gesture_vector(hci::normalize_gesture(ds.masks[i]));
        data.push_back({std::vector<double>(fv.begin(), fv.end()), ds.labels[i]});
    }
    return data;
}

// stratified seeded 50/50 split, first half trains
void split_half(const std::vector<hci::LabeledVector>& all, std::uint64_t seed,
                std::vector<hci::LabeledVector>& train, std::vector<hci::LabeledVector>& test) {
    hci::Rng rng(hci::Rng::mix(seed, 0x5b117ULL));
    for (int cls = 1; cls <= 5; ++cls) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < all.size(); ++i)
            if (all[i].label == cls) idx.push_back(i);
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < idx.size() / 2 ? train : test).push_back(all[idx[i]]);
    }
}

std::vector<fs::path> list_frames(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("frame directory not found: " + dir.string());
    std::vector<fs::path> frames;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension().string();
        if (ext == ".ppm" || ext == ".pnm") frames.push_back(entry.path());
    }
    std::sort(frames.begin(), frames.end());
    if (frames.empty()) throw DataError("no .ppm frames in " + dir.string());
    return frames;
}

hci::PipelineModels load_models(const hci::PipelineConfig& cfg) {
    if (cfg.cascade_path.empty() || cfg.moe_path.empty() || cfg.pca_path.empty())
        throw DataError("cascade, moe and pca model paths are all required (config keys models.* or flags)");
    hci::PipelineModels models;
    models.cascade = hci::load_cascade(cfg.cascade_path);
    models.moe = hci::load_moe(cfg.moe_path);
    auto [pca, gallery] = hci::load_pca(cfg.pca_path);
    models.pca = std::move(pca);
    models.gallery = std::move(gallery);
    return models;
}

std::string trace_csv(const std::vector<hci::FrameTrace>& trace) {
    std::ostringstream out;
    out << "frame,stage_before,stage_after,face_x,face_y,face_w,hand_x,hand_y,distance,threshold,trigger,"
           "vote,event,note\n";
    for (const auto& t : trace) {
        out << t.frame << "," << hci::stage_name(t.stage_before) << "," << hci::stage_name(t.stage_after) << ","
            << t.face_x << "," << t.face_y << "," << t.face_w << "," << t.hand_x << "," << t.hand_y << ","
            << t.distance << "," << t.threshold << "," << t.trigger << "," << t.vote_class << ","
            << (t.event_emitted ? 1 : 0) << "," << t.note << "\n";
    }
    return out.str();
}

json event_json(const hci::ControlEvent& ev) {
    return json{{"frame", ev.frame},
                {"gesture", "G" + std::to_string(ev.gesture_class)},
                {"command", hci::command_name(ev.command)},
                {"confidence", ev.confidence},
                {"identity", ev.identity}};
}

void draw_box(hci::Frame& f, int x, int y, int w, int h, hci::Rgb c) {
    for (int i = x; i < x + w; ++i) {
        if (f.in_bounds(i, y)) f.set(i, y, c);
        if (f.in_bounds(i, y + h - 1)) f.set(i, y + h - 1, c);
    }
    for (int j = y; j < y + h; ++j) {
        if (f.in_bounds(x, j)) f.set(x, j, c);
        if (f.in_bounds(x + w - 1, j)) f.set(x + w - 1, j, c);
    }
}

int cmd_synth(const std::string& kind, int count, int gesture, int identity, std::uint64_t seed,
              const fs::path& out_dir) {
    fs::create_directories(out_dir);
    if (kind == "gestures") {
        const hci::GestureDataset ds = hci::synth_gestures(count, seed);
        std::ostringstream labels;
        labels << "file,label\n";
        for (std::size_t i = 0; i < ds.masks.size(); ++i) {
            std::ostringstream name;
            name << "gesture_" << std::setw(5) << std::setfill('0') << i << ".pgm";
            hci::write_pnm(hci::mask_to_gray(ds.masks[i]), (out_dir / name.str()).string());
            labels << name.str() << "," << ds.labels[i] << "\n";
        }
        write_text(out_dir / "labels.csv", labels.str());
        std::cout << "wrote " << ds.masks.size() << " gesture masks to " << out_dir << "\n";
    } else if (kind == "faces") {
        const auto faces = hci::synth_identity_faces(count, seed);
        std::ostringstream labels;
        labels << "file,identity\n";
        for (std::size_t i = 0; i < faces.size(); ++i) {
            std::ostringstream name;
            name << "face_" << faces[i].first << "_" << std::setw(4) << std::setfill('0') << i << ".pgm";
            hci::write_pnm(faces[i].second, (out_dir / name.str()).string());
            labels << name.str() << "," << faces[i].first << "\n";
        }
        write_text(out_dir / "labels.csv", labels.str());
        std::cout << "wrote " << faces.size() << " face patches to " << out_dir << "\n";
    } else if (kind == "episode" || kind == "smoke") {
        const hci::SceneSpec spec = kind == "episode" ? hci::make_episode_spec(gesture, identity, seed)
                                                      : hci::make_smoke_spec(gesture, identity, seed);
        const hci::SceneFrames scene = hci::render_scene(spec);
        std::ostringstream truth;
        truth << "frame,hand_x,hand_y,arrival_frame,gesture,identity\n";
        for (std::size_t i = 0; i < scene.frames.size(); ++i) {
            std::ostringstream name;
            name << "frame_" << std::setw(4) << std::setfill('0') << i << ".ppm";
            hci::write_pnm(scene.frames[i], (out_dir / name.str()).string());
            truth << i << "," << scene.hand_centers[i].first << "," << scene.hand_centers[i].second << ","
                  << scene.arrival_frame << ",G" << scene.gesture_class << "," << scene.identity << "\n";
        }
        write_text(out_dir / "truth.csv", truth.str());
        std::cout << "wrote " << scene.frames.size() << " frames to " << out_dir << "\n";
    } else {
        throw CLI::ValidationError("--kind must be gestures|faces|episode|smoke");
    }
    return 0;
}

int cmd_train_cascade(int positives, int negatives, int rounds, std::uint64_t seed, const std::string& out) {
    const auto samples = hci::synth_cascade_samples(positives, negatives, seed);
    const hci::Cascade cascade = hci::train_cascade(samples, rounds);
    hci::save_cascade(cascade, out);

    int correct = 0;
    const hci::Window origin{0, 0, 1.0};
    for (const auto& s : samples) {
        const bool pass = hci::evaluate_window(cascade, hci::integral(s.image), origin);
        if (pass == (s.label > 0)) ++correct;
    }
    std::cout << "trained " << cascade.stages[0].weak.size() << " weak classifiers, training accuracy "
              << 100.0 * correct / samples.size() << "% -> " << out << "\n";
    return 0;
}

int cmd_train_moe(const std::string& data_dir, int synth_per_class, const std::string& experts_list,
                  const std::string& hidden_list, int epochs, std::uint64_t seed, const std::string& out,
                  const std::string& log_path) {
    std::vector<hci::LabeledVector> all;
    if (!data_dir.empty()) {
        all = load_gesture_dataset(data_dir);
    } else {
        all = features_from_masks(hci::synth_gestures(synth_per_class, seed));
    }
    std::vector<hci::LabeledVector> train, test;
    split_half(all, seed, train, test);

    auto parse_list = [](const std::string& s) {
        std::vector<int> v;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) v.push_back(std::stoi(tok));
        return v;
    };

    double best_acc = -1.0;
    hci::TrainResult best;
    std::cout << "experts,hidden,best_epoch,test_accuracy\n";
    for (int n_experts : parse_list(experts_list)) {
        for (int hidden : parse_list(hidden_list)) {
            hci::TrainConfig cfg;
            cfg.experts = n_experts;
            cfg.expert_hidden = hidden;
            cfg.epochs = epochs;
            cfg.seed = seed;
            hci::TrainResult res = hci::train_moe(train, test, 5, cfg);
            std::cout << n_experts << "," << hidden << "," << res.best_epoch << ","
                      << 100.0 * res.best_test_acc << "%\n";
            if (res.best_test_acc > best_acc) {
                best_acc = res.best_test_acc;
                best = std::move(res);
            }
        }
    }
    hci::save_moe(best.model, out);
    if (!log_path.empty()) {
        std::ostringstream log;
        log << "epoch,train_acc,test_acc\n";
        for (const auto& e : best.log) log << e.epoch << "," << e.train_acc << "," << e.test_acc << "\n";
        write_text(log_path, log.str());
    }
    std::cout << "saved best model (accuracy " << 100.0 * best_acc << "%) -> " << out << "\n";
    return 0;
}

int cmd_fit_faces(const std::string& faces_dir, int per_identity, int k, double threshold,
                  std::uint64_t seed, const std::string& out) {
    std::vector<std::pair<int, hci::GrayImage>> faces;
    if (!faces_dir.empty()) {
        for (const auto& [file, id] : read_labels_csv(fs::path(faces_dir) / "labels.csv"))
            faces.emplace_back(std::stoi(id), hci::read_gray_pnm((fs::path(faces_dir) / file).string()));
    } else {
        faces = hci::synth_identity_faces(per_identity, seed);
    }
    if (faces.size() < 2) throw DataError("need at least two face samples");

    std::vector<hci::GrayImage> images;
    for (auto& [id, img] : faces) {
        if (img.width != hci::kFacePatchSize || img.height != hci::kFacePatchSize)
            img = hci::resize_nearest(img, hci::kFacePatchSize, hci::kFacePatchSize);
        images.push_back(img);
    }
    const hci::PcaModel model = hci::fit_pca(images, k);

    hci::Gallery gallery;
    for (std::size_t i = 0; i < faces.size(); ++i)
        gallery.entries.push_back({faces[i].first, hci::project(images[i], model)});

    if (threshold > 0) {
        gallery.threshold = threshold;
    } else {
        // midpoint of worst intra-identity and best inter-identity NN distances
        double max_intra = 0.0, min_inter = 1e300;
        for (std::size_t i = 0; i < gallery.entries.size(); ++i) {
            double intra = 1e300, inter = 1e300;
            for (std::size_t j = 0; j < gallery.entries.size(); ++j) {
                if (i == j) continue;
                double d2 = 0;
                for (std::size_t d = 0; d < gallery.entries[i].coords.size(); ++d) {
                    const double diff = gallery.entries[i].coords[d] - gallery.entries[j].coords[d];
                    d2 += diff * diff;
                }
                const double dist = std::sqrt(d2);
                if (gallery.entries[i].identity == gallery.entries[j].identity)
                    intra = std::min(intra, dist);
                else
                    inter = std::min(inter, dist);
            }
            if (intra < 1e300) max_intra = std::max(max_intra, intra);
            min_inter = std::min(min_inter, inter);
        }
        gallery.threshold = max_intra < min_inter ? (max_intra + min_inter) / 2.0 : 1.25 * max_intra;
        if (gallery.threshold <= 0) gallery.threshold = 1.0;
    }
    hci::save_pca(model, gallery, out);
    std::cout << "fit " << k << " components over " << faces.size() << " faces, threshold "
              << gallery.threshold << " -> " << out << "\n";
    return 0;
}

int cmd_run(const std::string& frames_dir, hci::PipelineConfig cfg, const std::string& trace_path) {
    const hci::PipelineModels models = load_models(cfg);
    std::vector<hci::Frame> frames;
    for (const auto& p : list_frames(frames_dir)) frames.push_back(hci::read_frame_pnm(p.string()));
    const hci::PipelineResult result = hci::run_pipeline(frames, cfg, models);
    for (const auto& ev : result.events) std::cout << event_json(ev).dump() << "\n";
    if (!trace_path.empty()) write_text(trace_path, trace_csv(result.trace));
    return 0;
}

int cmd_trace(const std::string& frames_dir, hci::PipelineConfig cfg, const fs::path& out_dir) {
    const hci::PipelineModels models = load_models(cfg);
    std::vector<hci::Frame> frames;
    for (const auto& p : list_frames(frames_dir)) frames.push_back(hci::read_frame_pnm(p.string()));

    fs::create_directories(out_dir);
    hci::Pipeline pipe(cfg, models);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const hci::FrameTrace t = pipe.process(frames[i]);
        hci::Frame overlay = frames[i];
        if (t.face_w > 0)
            draw_box(overlay, int(t.face_x - t.face_w / 2), int(t.face_y - t.face_w / 2), int(t.face_w),
                     int(t.face_w), {40, 90, 255});
        if (t.hand_x >= 0) draw_box(overlay, int(t.hand_x) - 2, int(t.hand_y) - 2, 5, 5, {255, 60, 40});
        if (t.event_emitted)
            draw_box(overlay, 0, 0, overlay.width, overlay.height, {60, 255, 60});
        std::ostringstream name;
        name << "trace_" << std::setw(4) << std::setfill('0') << i << ".ppm";
        hci::write_pnm(overlay, (out_dir / name.str()).string());
    }
    std::cout << "wrote " << frames.size() << " overlay frames to " << out_dir << "\n";
    return 0;
}

int cmd_eval(const std::string& data_dir, const std::string& moe_path, const std::string& out_prefix) {
    const hci::MoEModel model = hci::load_moe(moe_path);
    const auto data = load_gesture_dataset(data_dir);
    const hci::EvalTables tables = hci::evaluate(model, data);
    const std::string rec = hci::recognition_table_csv(tables);
    const std::string conf = hci::confusion_csv(tables);
    if (out_prefix.empty()) {
        std::cout << rec << "\n" << conf;
    } else {
        write_text(out_prefix + "recognition.csv", rec);
        write_text(out_prefix + "confusion.csv", conf);
        std::cout << "wrote " << out_prefix << "recognition.csv and " << out_prefix << "confusion.csv\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"face and hand gesture HCI pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    app.add_option("--config", config_path, "pipeline config file (key=value lines)")->expected(1);
    app.add_option("--seed", seed, "global seed override")->each([&](const std::string&) { seed_set = true; });

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic datasets");
    std::string synth_kind = "gestures", synth_out;
    int synth_count = 100, synth_gesture = 3, synth_identity = 1;
    std::uint64_t synth_seed = 1;
    synth->add_option("--kind", synth_kind, "gestures|faces|episode|smoke");
    synth->add_option("--count", synth_count, "samples per class / identity");
    synth->add_option("--gesture", synth_gesture, "gesture class 1..5 for scenes")->check(CLI::Range(1, 5));
    synth->add_option("--identity", synth_identity, "identity 1..5 for scenes")->check(CLI::Range(1, 5));
    synth->add_option("-o,--out", synth_out, "output directory")->required();

    // train-cascade
    auto* tc = app.add_subcommand("train-cascade", "train the synthetic face cascade");
    int tc_pos = 200, tc_neg = 400, tc_rounds = 15;
    std::string tc_out;
    tc->add_option("--pos", tc_pos, "positive samples");
    tc->add_option("--neg", tc_neg, "negative samples");
    tc->add_option("--rounds", tc_rounds, "boosting rounds");
    tc->add_option("-o,--out", tc_out, "cascade file")->required();

    // train-moe
    auto* tm = app.add_subcommand("train-moe", "train the mixture-of-experts classifier");
    std::string tm_data, tm_experts = "3", tm_hidden = "20", tm_out, tm_log;
    int tm_synth = 100, tm_epochs = 300;
    tm->add_option("--data", tm_data, "gesture dataset directory (PGM masks + labels.csv)");
    tm->add_option("--synth-per-class", tm_synth, "generate this many samples per class instead");
    tm->add_option("--experts", tm_experts, "comma list of expert counts to sweep");
    tm->add_option("--hidden", tm_hidden, "comma list of expert hidden sizes to sweep");
    tm->add_option("--epochs", tm_epochs, "training epochs");
    tm->add_option("--log", tm_log, "write the winning config's per-epoch CSV log here");
    tm->add_option("-o,--out", tm_out, "model file")->required();

    // fit-faces
    auto* ff = app.add_subcommand("fit-faces", "fit PCA and build the identity gallery");
    std::string ff_dir, ff_out;
    int ff_per_identity = 10, ff_k = 12;
    double ff_threshold = 0.0;
    ff->add_option("--faces", ff_dir, "face directory (PGM patches + labels.csv)");
    ff->add_option("--per-identity", ff_per_identity, "synthetic samples per identity");
    ff->add_option("-k", ff_k, "retained components");
    ff->add_option("--threshold", ff_threshold, "acceptance distance (default: derived from the gallery)");
    ff->add_option("-o,--out", ff_out, "model file")->required();

    // run
    auto* run = app.add_subcommand("run", "run the pipeline over a frame directory, events as JSON lines");
    std::string run_frames, run_cascade, run_moe, run_pca, run_trace;
    run->add_option("--frames", run_frames, "directory of frame_*.ppm")->required();
    run->add_option("--cascade", run_cascade, "cascade file (overrides config)");
    run->add_option("--moe", run_moe, "MoE model file (overrides config)");
    run->add_option("--pca", run_pca, "PCA model file (overrides config)");
    run->add_option("--trace-csv", run_trace, "write the per-frame trace CSV here");

    // trace
    auto* trace = app.add_subcommand("trace", "run the pipeline and write overlay frames");
    std::string trace_frames, trace_cascade, trace_moe, trace_pca, trace_out;
    trace->add_option("--frames", trace_frames, "directory of frame_*.ppm")->required();
    trace->add_option("--cascade", trace_cascade, "cascade file (overrides config)");
    trace->add_option("--moe", trace_moe, "MoE model file (overrides config)");
    trace->add_option("--pca", trace_pca, "PCA model file (overrides config)");
    trace->add_option("-o,--out", trace_out, "output directory")->required();

    // eval
    auto* ev = app.add_subcommand("eval", "recognition-rate table and confusion matrix for a dataset");
    std::string ev_data, ev_moe, ev_out;
    ev->add_option("--data", ev_data, "gesture dataset directory")->required();
    ev->add_option("--moe", ev_moe, "MoE model file")->required();
    ev->add_option("-o,--out", ev_out, "output file prefix (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        hci::PipelineConfig cfg;
        if (!config_path.empty()) cfg = hci::load_config(config_path);
        if (seed_set) cfg.seed = seed;

        if (*synth) {
            return cmd_synth(synth_kind, synth_count, synth_gesture, synth_identity,
                             seed_set ? seed : synth_seed, synth_out);
        }
        if (*tc) return cmd_train_cascade(tc_pos, tc_neg, tc_rounds, seed_set ? seed : 1, tc_out);
        if (*tm)
            return cmd_train_moe(tm_data, tm_synth, tm_experts, tm_hidden, tm_epochs, seed_set ? seed : 1,
                                 tm_out, tm_log);
        if (*ff)
            return cmd_fit_faces(ff_dir, ff_per_identity, ff_k, ff_threshold, seed_set ? seed : 1, ff_out);
        if (*run) {
            if (!run_cascade.empty()) cfg.cascade_path = run_cascade;
            if (!run_moe.empty()) cfg.moe_path = run_moe;
            if (!run_pca.empty()) cfg.pca_path = run_pca;
            return cmd_run(run_frames, cfg, run_trace);
        }
        if (*trace) {
            if (!trace_cascade.empty()) cfg.cascade_path = trace_cascade;
            if (!trace_moe.empty()) cfg.moe_path = trace_moe;
            if (!trace_pca.empty()) cfg.pca_path = trace_pca;
            return cmd_trace(trace_frames, cfg, trace_out);
        }
        if (*ev) return cmd_eval(ev_data, ev_moe, ev_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

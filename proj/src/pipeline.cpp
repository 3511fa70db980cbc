// Copyright 2026 The avs3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "avs3d/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <map>

#include "avs3d/error.hpp"
#include "avs3d/gaussian.hpp"
#include "avs3d/intensity.hpp"
#include "avs3d/mask.hpp"
#include "avs3d/refine.hpp"
#include "avs3d/render.hpp"
#include "avs3d/wav.hpp"

namespace avs3d {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

class StageTimer {
public:
    template <typename Fn>
    auto time(const std::string& name, Fn&& fn) {
        const auto start = Clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(name, start);
        } else {
            auto result = fn();
            record(name, start);
            return result;
        }
    }

    json to_json() const {
        json j;
        for (const auto& [name, ms] : timings_) j[name] = ms;
        return j;
    }

private:
    void record(const std::string& name, Clock::time_point start) {
        timings_[name] =
            std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
    std::map<std::string, double> timings_;
};

json config_to_json(const PipelineConfig& cfg) {
    return {{"tau_voting", cfg.tau_voting},
            {"eps", cfg.eps},
            {"min_points", cfg.min_points},
            {"tau_ref", cfg.tau_ref},
            {"volume_sigma_factor", cfg.volume_sigma_factor},
            {"alpha_threshold", cfg.alpha_threshold},
            {"beta_squared", cfg.beta_squared},
            {"use_aisrm", cfg.use_aisrm},
            {"eval_split", split_name(cfg.eval_split)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

void write_run_manifest(const std::filesystem::path& path, const std::string& stage,
                        const json& inputs, const PipelineConfig& cfg, const json& outputs,
                        const StageTimer& timer, const json& stats) {
    json doc;
    doc["tool"] = "avs3d";
    doc["version"] = kToolVersion;
    doc["stage"] = stage;
    doc["inputs"] = inputs;
    doc["config"] = config_to_json(cfg);
    doc["outputs"] = outputs;
    doc["timings_ms"] = timer.to_json();
    doc["stats"] = stats;
    write_text(path, doc.dump(2) + "\n");
}

void ensure_out_dir(const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir.string());
}

RefinementConfig refinement_config(const PipelineConfig& cfg) {
    RefinementConfig rc;
    rc.eps = cfg.eps;
    rc.min_points = cfg.min_points;
    rc.tau_ref = cfg.tau_ref;
    rc.volume_sigma_factor = cfg.volume_sigma_factor;
    return rc;
}

RenderConfig render_config(const PipelineConfig& cfg) {
    RenderConfig rc;
    rc.alpha_threshold = cfg.alpha_threshold;
    return rc;
}

std::vector<View> load_views(const FrameSet& frames, const std::filesystem::path& masks_dir) {
    std::vector<View> views;
    views.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        View view;
        view.pose = frames.poses[i];
        view.mask = load_pgm(masks_dir / mask_filename(frames.frame_ids[i]));
        views.push_back(std::move(view));
    }
    return views;
}

std::vector<RmsObservation> load_observations(const FrameSet& frames,
                                              const std::filesystem::path& audio_dir) {
    std::vector<RmsObservation> observations;
    observations.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const StereoClip clip = load_wav(audio_dir / audio_filename(frames.frame_ids[i]));
        const auto [rms_l, rms_r] = channel_rms(clip);
        observations.push_back({rms_l, rms_r, frames.poses[i]});
    }
    return observations;
}

struct SplitFrames {
    std::vector<int> frame_ids;
    std::vector<EvalFrame> frames;
};

SplitFrames select_eval_frames(const FrameSet& frames,
                               const std::filesystem::path& gt_masks_dir,
                               PipelineConfig::Split split) {
    std::vector<std::size_t> picks;
    if (split == PipelineConfig::Split::Test) {
        picks = split_train_test(frames.size()).test;
    } else {
        picks.resize(frames.size());
        for (std::size_t i = 0; i < frames.size(); ++i) picks[i] = i;
    }
    SplitFrames out;
    for (const std::size_t i : picks) {
        EvalFrame frame;
        frame.pose = frames.poses[i];
        frame.gt = load_pgm(gt_masks_dir / mask_filename(frames.frame_ids[i]));
        out.frames.push_back(std::move(frame));
        out.frame_ids.push_back(frames.frame_ids[i]);
    }
    return out;
}

struct ManifestPaths {
    std::filesystem::path scene_ply;
    std::filesystem::path poses;
    std::filesystem::path gt_masks_dir;
    std::filesystem::path pred_masks_dir;
    std::filesystem::path audio_dir;
};

ManifestPaths parse_dataset_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open dataset manifest: " + manifest_path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("dataset manifest is not valid JSON: " + std::string(e.what()));
    }

    const auto base = manifest_path.parent_path();
    ManifestPaths paths;
    try {
        paths.scene_ply = base / doc.at("scene_ply").get<std::string>();
        paths.poses = base / doc.at("poses").get<std::string>();
        const json& frames = doc.at("frames");
        if (!frames.is_array() || frames.empty())
            throw ParseError("dataset manifest has no frames");
        // per-frame paths follow the fixed directory layout; take it from frame 0
        const json& first = frames.front();
        paths.gt_masks_dir =
            (base / first.at("gt_mask").get<std::string>()).parent_path();
        paths.pred_masks_dir =
            (base / first.at("pred_mask").get<std::string>()).parent_path();
        paths.audio_dir = (base / first.at("audio").get<std::string>()).parent_path();
    } catch (const json::exception& e) {
        throw ParseError("dataset manifest missing fields: " + std::string(e.what()));
    }
    return paths;
}

}  // namespace

std::string split_name(PipelineConfig::Split split) {
    return split == PipelineConfig::Split::Test ? "test" : "all";
}

FrameSet load_poses_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open poses file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("poses file is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_array()) throw ParseError("poses file must be a JSON array");

    std::vector<std::pair<int, CameraPose>> entries;
    try {
        for (const json& j : doc) {
            CameraPose pose;
            pose.fx = j.at("fx").get<double>();
            pose.fy = j.at("fy").get<double>();
            pose.cx = j.at("cx").get<double>();
            pose.cy = j.at("cy").get<double>();
            pose.width = j.at("width").get<int>();
            pose.height = j.at("height").get<int>();
            const json& r = j.at("rotation_wc");
            if (!r.is_array() || r.size() != 9)
                throw ParseError("rotation_wc must hold 9 numbers (row-major)");
            for (int row = 0; row < 3; ++row)
                for (int col = 0; col < 3; ++col)
                    pose.rotation_wc(row, col) = r[row * 3 + col].get<double>();
            const json& p = j.at("position");
            if (!p.is_array() || p.size() != 3)
                throw ParseError("position must hold 3 numbers");
            pose.position = Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
            validate_pose(pose);
            entries.emplace_back(j.at("frame").get<int>(), pose);
        }
    } catch (const json::exception& e) {
        throw ParseError("malformed pose record: " + std::string(e.what()));
    }

    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    FrameSet frames;
    for (auto& [frame, pose] : entries) {
        frames.frame_ids.push_back(frame);
        frames.poses.push_back(pose);
    }
    return frames;
}

void save_poses_json(const FrameSet& frames, const std::filesystem::path& path) {
    json doc = json::array();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const CameraPose& pose = frames.poses[i];
        json r = json::array();
        for (int row = 0; row < 3; ++row)
            for (int col = 0; col < 3; ++col) r.push_back(pose.rotation_wc(row, col));
        doc.push_back({{"frame", frames.frame_ids[i]},
                       {"fx", pose.fx},
                       {"fy", pose.fy},
                       {"cx", pose.cx},
                       {"cy", pose.cy},
                       {"width", pose.width},
                       {"height", pose.height},
                       {"rotation_wc", r},
                       {"position", json::array({pose.position.x(), pose.position.y(),
                                                 pose.position.z()})}});
    }
    write_text(path, doc.dump(2) + "\n");
}

StageOutputs run_lift(const std::filesystem::path& scene_ply,
                      const std::filesystem::path& masks_dir,
                      const std::filesystem::path& poses_path, const PipelineConfig& cfg,
                      const std::filesystem::path& out_dir) {
    ensure_out_dir(out_dir);
    StageTimer timer;

    const GaussianCloud cloud =
        timer.time("load_scene", [&] { return load_gsplat_ply(scene_ply); });
    const FrameSet frames =
        timer.time("load_frames", [&] { return load_poses_json(poses_path); });
    const std::vector<View> views =
        timer.time("load_masks", [&] { return load_views(frames, masks_dir); });
    const Segmentation seg = timer.time("vote", [&] {
        VotingConfig vc;
        vc.tau_voting = cfg.tau_voting;
        return vote(cloud, views, vc);
    });

    StageOutputs out;
    out.segmentation = out_dir / "lifted.seg";
    out.run_manifest = out_dir / "lift_manifest.json";
    out.selected_count = seg.size();
    save_segmentation(seg, out.segmentation);
    write_run_manifest(out.run_manifest, "lift",
                       {{"scene_ply", scene_ply.string()},
                        {"masks_dir", masks_dir.string()},
                        {"poses", poses_path.string()}},
                       cfg, {{"segmentation", out.segmentation.string()}}, timer,
                       {{"gaussians", cloud.size()},
                        {"frames", frames.size()},
                        {"selected", seg.size()}});
    return out;
}

StageOutputs run_refine(const std::filesystem::path& scene_ply,
                        const std::filesystem::path& seg_path,
                        const std::filesystem::path& audio_dir,
                        const std::filesystem::path& poses_path, const PipelineConfig& cfg,
                        const std::filesystem::path& out_dir) {
    ensure_out_dir(out_dir);
    StageTimer timer;

    StageOutputs out;
    out.segmentation = out_dir / "refined.seg";
    out.run_manifest = out_dir / "refine_manifest.json";

    bool refined = false;
    std::size_t input_count = 0;
    if (!cfg.use_aisrm) {
        // pass-through arm: byte-identical copy of the input segmentation
        std::ifstream in(seg_path, std::ios::binary);
        if (!in) throw IoError("cannot open segmentation file: " + seg_path.string());
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        write_text(out.segmentation, bytes);
        out.selected_count = load_segmentation(seg_path).size();
        input_count = out.selected_count;
    } else {
        const GaussianCloud cloud =
            timer.time("load_scene", [&] { return load_gsplat_ply(scene_ply); });
        const Segmentation seg =
            timer.time("load_seg", [&] { return load_segmentation(seg_path); });
        input_count = seg.size();
        if (seg.empty())
            throw EmptySegmentation("refinement input segmentation is empty");
        const FrameSet frames =
            timer.time("load_frames", [&] { return load_poses_json(poses_path); });
        const std::vector<RmsObservation> observations =
            timer.time("load_audio", [&] { return load_observations(frames, audio_dir); });
        const AudioIntensityMap map = timer.time(
            "intensity", [&] { return accumulate_intensity(cloud, observations); });
        RefineResult result;
        try {
            result = timer.time(
                "refine", [&] { return refine(cloud, seg, map, refinement_config(cfg)); });
        } catch (const NoQualifyingGaussians& e) {
            throw NoQualifyingGaussians(std::string(e.what()) +
                                        "; lower --tau-ref or check the audio input");
        }
        refined = result.refined;
        out.selected_count = result.segmentation.size();
        save_segmentation(result.segmentation, out.segmentation);
    }

    write_run_manifest(out.run_manifest, "refine",
                       {{"scene_ply", scene_ply.string()},
                        {"segmentation", seg_path.string()},
                        {"audio_dir", audio_dir.string()},
                        {"poses", poses_path.string()}},
                       cfg, {{"segmentation", out.segmentation.string()}}, timer,
                       {{"input_selected", input_count},
                        {"output_selected", out.selected_count},
                        {"refined", refined}});
    return out;
}

StageOutputs run_eval(const std::filesystem::path& scene_ply,
                      const std::filesystem::path& seg_path,
                      const std::filesystem::path& gt_masks_dir,
                      const std::filesystem::path& poses_path, const PipelineConfig& cfg,
                      const std::filesystem::path& out_dir) {
    ensure_out_dir(out_dir);
    StageTimer timer;

    const GaussianCloud cloud =
        timer.time("load_scene", [&] { return load_gsplat_ply(scene_ply); });
    const Segmentation seg =
        timer.time("load_seg", [&] { return load_segmentation(seg_path); });
    const FrameSet frames =
        timer.time("load_frames", [&] { return load_poses_json(poses_path); });
    const SplitFrames split = timer.time(
        "load_gt", [&] { return select_eval_frames(frames, gt_masks_dir, cfg.eval_split); });

    EvalConfig ec;
    ec.beta_squared = cfg.beta_squared;
    const Metrics metrics = timer.time("evaluate", [&] {
        return evaluate(cloud, seg, split.frames, render_config(cfg), ec);
    });

    // rendered predictions mirror the input naming for side-by-side diffing
    const std::filesystem::path rendered_dir = out_dir / "rendered_masks";
    timer.time("dump_masks", [&] {
        ensure_out_dir(rendered_dir);
        for (std::size_t i = 0; i < split.frames.size(); ++i)
            save_pgm(render_mask(cloud, seg, split.frames[i].pose, render_config(cfg)),
                     rendered_dir / mask_filename(split.frame_ids[i]));
    });

    StageOutputs out;
    out.metrics = out_dir / "metrics.json";
    out.run_manifest = out_dir / "eval_manifest.json";
    out.metric_values = metrics;
    out.selected_count = seg.size();
    write_text(out.metrics,
               metrics_json(metrics, split.frame_ids, split_name(cfg.eval_split)));
    write_run_manifest(out.run_manifest, "eval",
                       {{"scene_ply", scene_ply.string()},
                        {"segmentation", seg_path.string()},
                        {"gt_masks_dir", gt_masks_dir.string()},
                        {"poses", poses_path.string()}},
                       cfg,
                       {{"metrics", out.metrics.string()},
                        {"rendered_masks", rendered_dir.string()}},
                       timer,
                       {{"frames_evaluated", split.frames.size()},
                        {"miou", metrics.miou},
                        {"fscore", metrics.fscore}});
    return out;
}

StageOutputs run_pipeline(const std::filesystem::path& manifest_path,
                          const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                          std::span<const double> sweep_taus) {
    ensure_out_dir(out_dir);
    StageTimer timer;

    const ManifestPaths paths = parse_dataset_manifest(manifest_path);
    const GaussianCloud cloud =
        timer.time("load_scene", [&] { return load_gsplat_ply(paths.scene_ply); });
    const FrameSet frames =
        timer.time("load_frames", [&] { return load_poses_json(paths.poses); });
    const std::vector<View> views =
        timer.time("load_masks", [&] { return load_views(frames, paths.pred_masks_dir); });
    const std::vector<VoteTally> tallies =
        timer.time("tally", [&] { return tally_votes(cloud, views); });
    const SplitFrames split = timer.time("load_gt", [&] {
        return select_eval_frames(frames, paths.gt_masks_dir, cfg.eval_split);
    });

    // Observations are only decoded when some arm refines.
    std::vector<RmsObservation> observations;
    AudioIntensityMap intensity;
    bool have_intensity = false;
    auto ensure_intensity = [&] {
        if (have_intensity) return;
        observations =
            timer.time("load_audio", [&] { return load_observations(frames, paths.audio_dir); });
        intensity = timer.time("intensity",
                               [&] { return accumulate_intensity(cloud, observations); });
        have_intensity = true;
    };

    EvalConfig ec;
    ec.beta_squared = cfg.beta_squared;

    auto run_arm = [&](double tau) {
        VotingConfig vc;
        vc.tau_voting = tau;
        Segmentation lifted = select_from_tallies(tallies, vc);
        Segmentation refined = lifted;
        bool did_refine = false;
        if (cfg.use_aisrm && !lifted.empty()) {
            ensure_intensity();
            const RefineResult result = refine(cloud, lifted, intensity, refinement_config(cfg));
            refined = result.segmentation;
            did_refine = result.refined;
        }
        const Metrics metrics = evaluate(cloud, refined, split.frames, render_config(cfg), ec);
        struct Arm {
            Segmentation lifted, refined;
            Metrics metrics;
            bool did_refine;
        };
        return Arm{std::move(lifted), std::move(refined), metrics, did_refine};
    };

    const auto main_arm = run_arm(cfg.tau_voting);

    StageOutputs out;
    out.segmentation = out_dir / "refined.seg";
    out.metrics = out_dir / "metrics.json";
    out.refined_ply = out_dir / "refined.ply";
    out.run_manifest = out_dir / "run_manifest.json";
    out.metric_values = main_arm.metrics;
    out.selected_count = main_arm.refined.size();

    save_segmentation(main_arm.lifted, out_dir / "lifted.seg");
    save_segmentation(main_arm.refined, out.segmentation);
    save_gsplat_ply(subcloud(cloud, main_arm.refined.selected), out.refined_ply);
    write_text(out.metrics,
               metrics_json(main_arm.metrics, split.frame_ids, split_name(cfg.eval_split)));

    json stats = {{"gaussians", cloud.size()},
                  {"frames", frames.size()},
                  {"lifted", main_arm.lifted.size()},
                  {"refined", main_arm.refined.size()},
                  {"aisrm_applied", main_arm.did_refine},
                  {"miou", main_arm.metrics.miou},
                  {"fscore", main_arm.metrics.fscore}};

    if (!sweep_taus.empty()) {
        json sweep;
        sweep["tau_values"] = std::vector<double>(sweep_taus.begin(), sweep_taus.end());
        json results = json::array();
        for (const double tau : sweep_taus) {
            const auto arm = run_arm(tau);
            results.push_back({{"tau", tau},
                               {"miou", arm.metrics.miou},
                               {"fscore", arm.metrics.fscore},
                               {"lifted", arm.lifted.size()},
                               {"refined", arm.refined.size()},
                               {"aisrm_applied", arm.did_refine}});
        }
        sweep["results"] = results;
        write_text(out_dir / "sweep.json", sweep.dump(2) + "\n");
        stats["sweep"] = "sweep.json";
    }

    write_run_manifest(out.run_manifest, "pipeline",
                       {{"manifest", manifest_path.string()}}, cfg,
                       {{"lifted_seg", (out_dir / "lifted.seg").string()},
                        {"refined_seg", out.segmentation.string()},
                        {"refined_ply", out.refined_ply.string()},
                        {"metrics", out.metrics.string()}},
                       timer, stats);
    return out;
}

}  // namespace avs3d

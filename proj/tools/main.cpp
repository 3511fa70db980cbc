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

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "avs3d/error.hpp"
#include "avs3d/pipeline.hpp"
#include "avs3d/synth.hpp"

namespace {

using avs3d::PipelineConfig;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitPipeline = 3;
constexpr int kExitIo = 4;

// Raw option values as given on the command line; only values the user set
// override the config file, which overrides the defaults.
struct CliOptions {
    std::string config_path;
    double tau_voting = 0.3;
    double eps = 0.04;
    int min_points = 6;
    double tau_ref = 0.85;
    double alpha_threshold = 0.5;
    double beta_squared = 0.3;
    bool no_aisrm = false;
    std::string eval_split = "test";
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::vector<double> sweep_tau;
};

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--config", opts.config_path,
                    "config file (flat key-value lines mirroring the flag names)");
    cmd->add_option("--tau-voting", opts.tau_voting, "mask-voting ratio threshold")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--eps", opts.eps, "DBSCAN radius in world units");
    cmd->add_option("--min-points", opts.min_points, "DBSCAN core point threshold");
    cmd->add_option("--tau-ref", opts.tau_ref, "normalized audio intensity threshold")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--alpha-threshold", opts.alpha_threshold, "mask rendering alpha cut");
    cmd->add_option("--beta-squared", opts.beta_squared, "F-measure precision weight");
    cmd->add_flag("--no-aisrm", opts.no_aisrm, "skip the audio-informed refinement");
    cmd->add_option("--eval-split", opts.eval_split, "evaluation split")
        ->check(CLI::IsMember({"test", "all"}));
    cmd->add_option("--seed", opts.seed, "override the scene spec seed");
    cmd->add_option("--sweep-tau", opts.sweep_tau,
                    "comma-separated tau_voting values to sweep")
        ->delimiter(',');
    cmd->add_option("--out", opts.out_dir, "output directory");
}

// Applies config-file values for every key whose flag the user did not set.
void apply_config_file(const CLI::App* cmd, CliOptions& opts) {
    if (opts.config_path.empty()) return;
    std::ifstream in(opts.config_path);
    if (!in) throw avs3d::IoError("cannot open config file: " + opts.config_path);

    auto flag_given = [&](const std::string& name) {
        const CLI::Option* opt = cmd->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string key, value;
        std::istringstream iss(line);
        if (!(iss >> key)) continue;  // blank line
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
            if (value.empty()) iss >> value;
        } else {
            iss >> value;
        }
        if (value.empty())
            throw avs3d::InputError("config line " + std::to_string(line_no) +
                                    ": missing value for '" + key + "'");
        try {
            if (key == "tau-voting") {
                if (!flag_given("--tau-voting")) opts.tau_voting = std::stod(value);
            } else if (key == "eps") {
                if (!flag_given("--eps")) opts.eps = std::stod(value);
            } else if (key == "min-points") {
                if (!flag_given("--min-points")) opts.min_points = std::stoi(value);
            } else if (key == "tau-ref") {
                if (!flag_given("--tau-ref")) opts.tau_ref = std::stod(value);
            } else if (key == "alpha-threshold") {
                if (!flag_given("--alpha-threshold")) opts.alpha_threshold = std::stod(value);
            } else if (key == "beta-squared") {
                if (!flag_given("--beta-squared")) opts.beta_squared = std::stod(value);
            } else if (key == "no-aisrm") {
                if (!flag_given("--no-aisrm")) opts.no_aisrm = (value == "true" || value == "1");
            } else if (key == "eval-split") {
                if (value != "test" && value != "all")
                    throw avs3d::InputError("config: eval-split must be 'test' or 'all'");
                if (!flag_given("--eval-split")) opts.eval_split = value;
            } else if (key == "seed") {
                if (!flag_given("--seed")) opts.seed = std::stoull(value);
            } else if (key == "out") {
                if (!flag_given("--out")) opts.out_dir = value;
            } else {
                throw avs3d::InputError("config line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
            }
        } catch (const avs3d::Error&) {
            throw;
        } catch (const std::exception&) {
            throw avs3d::InputError("config line " + std::to_string(line_no) +
                                    ": bad value '" + value + "' for '" + key + "'");
        }
    }
}

PipelineConfig to_pipeline_config(const CliOptions& opts) {
    PipelineConfig cfg;
    cfg.tau_voting = opts.tau_voting;
    cfg.eps = opts.eps;
    cfg.min_points = opts.min_points;
    cfg.tau_ref = opts.tau_ref;
    cfg.alpha_threshold = opts.alpha_threshold;
    cfg.beta_squared = opts.beta_squared;
    cfg.use_aisrm = !opts.no_aisrm;
    cfg.eval_split = opts.eval_split == "all" ? PipelineConfig::Split::All
                                              : PipelineConfig::Split::Test;
    return cfg;
}

void print_metrics(const avs3d::StageOutputs& out) {
    std::printf("miou=%.6f fscore=%.6f (%zu frames) -> %s\n", out.metric_values.miou,
                out.metric_values.fscore, out.metric_values.per_frame_iou.size(),
                out.metrics.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sounding-object segmentation for 3D Gaussian splat scenes"};
    app.set_version_flag("--version", avs3d::kToolVersion);
    app.require_subcommand(1);

    CliOptions opts;

    auto* synth = app.add_subcommand(
        "synth", "generate a synthetic dataset (scene, poses, masks, audio)");
    std::string spec_path;
    synth->add_option("spec", spec_path, "scene spec JSON file")->required();
    add_common_flags(synth, opts);

    auto* lift = app.add_subcommand("lift", "lift per-frame 2D masks to a 3D segmentation");
    std::string scene_ply, masks_dir, poses_path;
    lift->add_option("scene", scene_ply, "Gaussian scene PLY")->required();
    lift->add_option("masks", masks_dir, "directory of mask_%05d.pgm files")->required();
    lift->add_option("poses", poses_path, "poses JSON file")->required();
    add_common_flags(lift, opts);

    auto* refine = app.add_subcommand(
        "refine", "refine a segmentation with the audio intensity map");
    std::string seg_path, audio_dir;
    refine->add_option("scene", scene_ply, "Gaussian scene PLY")->required();
    refine->add_option("segmentation", seg_path, "input .seg file")->required();
    refine->add_option("audio", audio_dir, "directory of audio_%05d.wav clips")->required();
    refine->add_option("poses", poses_path, "poses JSON file")->required();
    add_common_flags(refine, opts);

    auto* eval = app.add_subcommand("eval", "render a segmentation and score mIoU/F-score");
    std::string gt_masks_dir;
    eval->add_option("scene", scene_ply, "Gaussian scene PLY")->required();
    eval->add_option("segmentation", seg_path, "input .seg file")->required();
    eval->add_option("gt_masks", gt_masks_dir, "directory of ground-truth masks")->required();
    eval->add_option("poses", poses_path, "poses JSON file")->required();
    add_common_flags(eval, opts);

    auto* pipeline = app.add_subcommand(
        "pipeline", "full lift -> refine -> eval run from a dataset manifest");
    std::string manifest_path;
    pipeline->add_option("manifest", manifest_path, "dataset manifest.json")->required();
    add_common_flags(pipeline, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    CLI::App* active = app.get_subcommands().front();
    const std::string stage = active->get_name();

    try {
        apply_config_file(active, opts);
        const PipelineConfig cfg = to_pipeline_config(opts);

        if (active == synth) {
            avs3d::DatasetSpec spec = avs3d::load_dataset_spec(spec_path);
            if (opts.seed) spec.scene.seed = *opts.seed;
            const auto manifest = avs3d::export_dataset(spec, opts.out_dir);
            std::printf("dataset written: %s\n", manifest.string().c_str());
        } else if (active == lift) {
            const auto out = avs3d::run_lift(scene_ply, masks_dir, poses_path, cfg, opts.out_dir);
            std::printf("selected %zu gaussians -> %s\n", out.selected_count,
                        out.segmentation.string().c_str());
        } else if (active == refine) {
            const auto out =
                avs3d::run_refine(scene_ply, seg_path, audio_dir, poses_path, cfg, opts.out_dir);
            std::printf("refined to %zu gaussians -> %s\n", out.selected_count,
                        out.segmentation.string().c_str());
        } else if (active == eval) {
            const auto out =
                avs3d::run_eval(scene_ply, seg_path, gt_masks_dir, poses_path, cfg, opts.out_dir);
            print_metrics(out);
        } else if (active == pipeline) {
            const auto out =
                avs3d::run_pipeline(manifest_path, cfg, opts.out_dir, opts.sweep_tau);
            print_metrics(out);
            if (!opts.sweep_tau.empty()) {
                const auto sweep_path = std::filesystem::path(opts.out_dir) / "sweep.json";
                std::ifstream sweep_in(sweep_path);
                nlohmann::json sweep = nlohmann::json::parse(sweep_in);
                std::printf("%8s %8s %8s %8s %8s\n", "tau", "miou", "fscore", "lifted",
                            "refined");
                for (const auto& row : sweep["results"])
                    std::printf("%8.2f %8.4f %8.4f %8zu %8zu\n", row["tau"].get<double>(),
                                row["miou"].get<double>(), row["fscore"].get<double>(),
                                row["lifted"].get<std::size_t>(),
                                row["refined"].get<std::size_t>());
                std::printf("sweep -> %s\n", sweep_path.string().c_str());
            }
        }
    } catch (const avs3d::InputError& e) {
        std::fprintf(stderr, "[%s] input error: %s\n", stage.c_str(), e.what());
        return kExitInput;
    } catch (const avs3d::IoError& e) {
        std::fprintf(stderr, "[%s] io error: %s\n", stage.c_str(), e.what());
        return kExitIo;
    } catch (const avs3d::PipelineError& e) {
        std::fprintf(stderr, "[%s] pipeline error: %s\n", stage.c_str(), e.what());
        return kExitPipeline;
    } catch (const avs3d::Error& e) {
        std::fprintf(stderr, "[%s] error: %s\n", stage.c_str(), e.what());
        return kExitPipeline;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "[%s] unexpected error: %s\n", stage.c_str(), e.what());
        return kExitUsage;
    }
    return kExitOk;
}

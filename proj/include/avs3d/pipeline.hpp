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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "avs3d/camera.hpp"
#include "avs3d/lifting.hpp"
#include "avs3d/metrics.hpp"

namespace avs3d {

inline constexpr const char* kToolVersion = "0.1.0";

/// Resolved configuration for the file-level pipeline stages. Defaults follow
/// the refinement and voting thresholds the library is tuned for.
struct PipelineConfig {
    double tau_voting = 0.3;
    double eps = 0.04;
    int min_points = 6;
    double tau_ref = 0.85;
    double volume_sigma_factor = 0.5;
    double alpha_threshold = 0.5;
    double beta_squared = 0.3;
    bool use_aisrm = true;
    enum class Split { Test, All } eval_split = Split::Test;
};

std::string split_name(PipelineConfig::Split split);

/// Frame ids and poses loaded from a poses.json file, sorted by frame id.
struct FrameSet {
    std::vector<int> frame_ids;
    std::vector<CameraPose> poses;

    std::size_t size() const { return frame_ids.size(); }
};

FrameSet load_poses_json(const std::filesystem::path& path);
void save_poses_json(const FrameSet& frames, const std::filesystem::path& path);

struct StageOutputs {
    std::filesystem::path segmentation;   // lift/refine
    std::filesystem::path metrics;        // eval/pipeline
    std::filesystem::path refined_ply;    // pipeline
    std::filesystem::path run_manifest;
    Metrics metric_values;                // eval/pipeline
    std::size_t selected_count = 0;
};

/// Lift: vote the per-frame masks in masks_dir over all frames in the poses
/// file; writes <out>/lifted.seg and a run manifest.
StageOutputs run_lift(const std::filesystem::path& scene_ply,
                      const std::filesystem::path& masks_dir,
                      const std::filesystem::path& poses_path, const PipelineConfig& cfg,
                      const std::filesystem::path& out_dir);

/// Refine: accumulate the audio intensity map from audio_dir and apply the
/// audio-informed refinement; writes <out>/refined.seg. With use_aisrm off
/// the input segmentation bytes are copied through unchanged.
StageOutputs run_refine(const std::filesystem::path& scene_ply,
                        const std::filesystem::path& seg_path,
                        const std::filesystem::path& audio_dir,
                        const std::filesystem::path& poses_path, const PipelineConfig& cfg,
                        const std::filesystem::path& out_dir);

/// Eval: render the segmentation for the selected split and score against the
/// ground-truth masks; writes <out>/metrics.json.
StageOutputs run_eval(const std::filesystem::path& scene_ply,
                      const std::filesystem::path& seg_path,
                      const std::filesystem::path& gt_masks_dir,
                      const std::filesystem::path& poses_path, const PipelineConfig& cfg,
                      const std::filesystem::path& out_dir);

/// Full pipeline from a dataset manifest: lift -> refine -> eval, plus the
/// refined sub-cloud PLY. When sweep_taus is non-empty the lift/refine/eval
/// chain additionally re-runs per tau and <out>/sweep.json records the
/// per-tau metrics.
StageOutputs run_pipeline(const std::filesystem::path& manifest_path,
                          const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                          std::span<const double> sweep_taus = {});

}  // namespace avs3d

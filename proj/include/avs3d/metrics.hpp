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

#include <cstddef>
#include <span>
#include <vector>

#include "avs3d/camera.hpp"
#include "avs3d/lifting.hpp"
#include "avs3d/mask.hpp"
#include "avs3d/render.hpp"

namespace avs3d {

struct EvalConfig {
    double beta_squared = 0.3;  // F-measure precision weight
};

struct Metrics {
    double miou = 0.0;    // mean of per_frame_iou
    double fscore = 0.0;  // mean of per_frame_fscore
    std::vector<double> per_frame_iou;
    std::vector<double> per_frame_fscore;
};

/// |pred and gt| / |pred or gt|; 1 when both masks are empty.
/// Throws DimensionMismatch.
double iou(const MaskImage& pred, const MaskImage& gt);

/// Weighted F-measure over pixels: (1+b^2) P R / (b^2 P + R) with
/// b^2 = cfg.beta_squared; 0 when TP = 0, 1 when both masks are empty.
/// Throws DimensionMismatch.
double fscore(const MaskImage& pred, const MaskImage& gt, const EvalConfig& cfg);

struct EvalFrame {
    CameraPose pose;
    MaskImage gt;
};

/// Renders the segmentation for each frame pose and scores against the
/// ground-truth masks; per-frame results in frame order.
/// Throws EmptyFrames.
Metrics evaluate(const GaussianCloud& cloud, const Segmentation& seg,
                 std::span<const EvalFrame> frames, const RenderConfig& render_cfg,
                 const EvalConfig& eval_cfg);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Held-out-every-8th split (7:1): frame indices with index % 8 == 0 form the
/// test set. Throws TooFewFrames for fewer than 8 frames.
SplitIndices split_train_test(std::size_t frame_count);

/// JSON document with keys miou, fscore, per_frame_iou (plus per-frame
/// F-scores and the evaluated frame ids).
std::string metrics_json(const Metrics& metrics, std::span<const int> frame_ids,
                         const std::string& split_name);

}  // namespace avs3d

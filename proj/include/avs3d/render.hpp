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

#include "avs3d/camera.hpp"
#include "avs3d/gaussian.hpp"
#include "avs3d/lifting.hpp"
#include "avs3d/mask.hpp"

namespace avs3d {

struct RenderConfig {
    double alpha_threshold = 0.5;
    double sigma_cutoff = 3.0;  // ellipse footprint extent in standard deviations
};

/// Splats the selected Gaussians into a binary mask. For each selected
/// Gaussian with an in-view center the screen covariance gives a per-pixel
/// alpha opacity * exp(-0.5 * d^T S^-1 d) inside the sigma_cutoff ellipse;
/// pixels keep the maximum alpha over all Gaussians (order-independent) and
/// the mask is alpha >= alpha_threshold. Pixels sample at their centers.
/// An empty segmentation renders an all-zero mask.
MaskImage render_mask(const GaussianCloud& cloud, const Segmentation& seg,
                      const CameraPose& pose, const RenderConfig& cfg);

}  // namespace avs3d

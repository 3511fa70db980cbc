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

#include <span>
#include <vector>

#include "avs3d/camera.hpp"
#include "avs3d/gaussian.hpp"

namespace avs3d {

/// Channel RMS pair of one binaural clip plus the agent pose at capture time.
struct RmsObservation {
    double rms_left = 0.0;
    double rms_right = 0.0;
    CameraPose pose;
};

/// Per-Gaussian audio intensity labels: raw accumulated values and the
/// scene-max normalized copy in [0, 1].
struct AudioIntensityMap {
    std::vector<double> raw;
    std::vector<double> normalized;
};

/// |R_l - R_r| / max(R_l, R_r); 0 when both channels are silent.
double intensity_weight(double rms_left, double rms_right);

/// 1 iff the point lies on the louder side of the agent: the signed offset
/// along the agent's right axis agrees with the louder channel. Ties (point
/// on the sagittal plane or equal channels) return 0.
int side_indicator(const RmsObservation& obs, const Vec3& center);

/// Accumulates the audio intensity map over observations in index order:
/// raw I_g = sum_i intensity_weight_i * side_indicator_i, then normalized by
/// the scene-wide maximum (all-zero maps stay zero).
/// Throws EmptyObservations.
AudioIntensityMap accumulate_intensity(const GaussianCloud& cloud,
                                       std::span<const RmsObservation> observations);

}  // namespace avs3d

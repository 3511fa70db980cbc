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

#include "avs3d/intensity.hpp"

#include <algorithm>
#include <cmath>

#include "avs3d/error.hpp"

namespace avs3d {

double intensity_weight(double rms_left, double rms_right) {
    const double peak = std::max(rms_left, rms_right);
    if (peak <= 0.0) return 0.0;
    return std::abs(rms_left - rms_right) / peak;
}

int side_indicator(const RmsObservation& obs, const Vec3& center) {
    const double s = (center - obs.pose.position).dot(obs.pose.right_axis());
    if (s > 0.0 && obs.rms_right > obs.rms_left) return 1;
    if (s < 0.0 && obs.rms_left > obs.rms_right) return 1;
    return 0;
}

AudioIntensityMap accumulate_intensity(const GaussianCloud& cloud,
                                       std::span<const RmsObservation> observations) {
    if (observations.empty())
        throw EmptyObservations("intensity accumulation requires at least one observation");

    AudioIntensityMap map;
    map.raw.assign(cloud.size(), 0.0);
    for (const RmsObservation& obs : observations) {
        const double weight = intensity_weight(obs.rms_left, obs.rms_right);
        if (weight == 0.0) continue;
        for (std::size_t g = 0; g < cloud.size(); ++g)
            if (side_indicator(obs, cloud[g].center)) map.raw[g] += weight;
    }

    map.normalized.assign(cloud.size(), 0.0);
    const double peak =
        cloud.empty() ? 0.0 : *std::max_element(map.raw.begin(), map.raw.end());
    if (peak > 0.0)
        for (std::size_t g = 0; g < cloud.size(); ++g)
            map.normalized[g] = map.raw[g] / peak;
    return map;
}

}  // namespace avs3d

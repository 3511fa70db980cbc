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

#include "avs3d/render.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "avs3d/error.hpp"

namespace avs3d {

MaskImage render_mask(const GaussianCloud& cloud, const Segmentation& seg,
                      const CameraPose& pose, const RenderConfig& cfg) {
    validate_segmentation(seg, cloud);

    const int w = pose.width;
    const int h = pose.height;
    std::vector<double> alpha(static_cast<std::size_t>(w) * h, 0.0);
    const double cutoff_sq = cfg.sigma_cutoff * cfg.sigma_cutoff;

    for (const std::uint32_t idx : seg.selected) {
        const Gaussian& g = cloud[idx];
        const ProjectionResult pr = project_point(pose, g.center);
        if (!pr.in_view()) continue;

        const Mat2 cov = project_covariance(pose, g);
        const double a = cov(0, 0);
        const double b = cov(0, 1);
        const double c = cov(1, 1);
        const double det = a * c - b * b;
        if (!(det > 0.0) || !std::isfinite(det)) continue;  // sub-pixel degenerate
        const double inv_a = c / det;
        const double inv_b = -b / det;
        const double inv_c = a / det;

        // footprint bounding box, one pixel of slack; the ellipse test decides
        const double ru = cfg.sigma_cutoff * std::sqrt(a);
        const double rv = cfg.sigma_cutoff * std::sqrt(c);
        const int x0 = std::max(0, static_cast<int>(std::floor(pr.u - ru)) - 1);
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(pr.u + ru)) + 1);
        const int y0 = std::max(0, static_cast<int>(std::floor(pr.v - rv)) - 1);
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(pr.v + rv)) + 1);

        for (int y = y0; y <= y1; ++y) {
            const double dy = (y + 0.5) - pr.v;
            for (int x = x0; x <= x1; ++x) {
                double& slot = alpha[static_cast<std::size_t>(y) * w + x];
                // already past the threshold: the mask bit cannot change
                if (slot >= cfg.alpha_threshold) continue;
                const double dx = (x + 0.5) - pr.u;
                const double m2 = dx * dx * inv_a + 2.0 * dx * dy * inv_b + dy * dy * inv_c;
                if (m2 > cutoff_sq) continue;
                const double value = g.opacity * std::exp(-0.5 * m2);
                slot = std::max(slot, value);
            }
        }
    }

    MaskImage mask = MaskImage::zeros(w, h);
    for (std::size_t i = 0; i < alpha.size(); ++i)
        mask.data[i] = alpha[i] >= cfg.alpha_threshold ? 1 : 0;
    return mask;
}

}  // namespace avs3d

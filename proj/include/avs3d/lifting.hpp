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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "avs3d/camera.hpp"
#include "avs3d/gaussian.hpp"
#include "avs3d/mask.hpp"

namespace avs3d {

enum class ProjectionClass { InMask, InBackground, OutOfView };

/// Per-Gaussian vote counts over a set of views. The three counts always sum
/// to the number of views.
struct VoteTally {
    int in_mask = 0;
    int in_background = 0;
    int out_of_view = 0;

    int visible() const { return in_mask + in_background; }
};

struct VotingConfig {
    double tau_voting = 0.3;
};

/// Sorted set of selected Gaussian indices into a specific cloud.
struct Segmentation {
    std::vector<std::uint32_t> selected;

    std::size_t size() const { return selected.size(); }
    bool empty() const { return selected.empty(); }
};

/// One observation frame used for lifting: a camera pose and the binary
/// object mask predicted for that view.
struct View {
    CameraPose pose;
    MaskImage mask;
};

/// OutOfView iff the center projects out of view; otherwise the mask value at
/// (floor(u), floor(v)) decides. Throws DimensionMismatch when mask and pose
/// sizes differ.
ProjectionClass classify_projection(const CameraPose& pose, const MaskImage& mask,
                                    const Vec3& center);

/// Tally of classify_projection over all views, per Gaussian.
std::vector<VoteTally> tally_votes(const GaussianCloud& cloud, std::span<const View> views);

/// Applies the voting rule to precomputed tallies: a Gaussian is selected iff
/// it was visible in at least one view and in_mask / visible >= tau_voting.
/// Out-of-view projections never participate in the ratio.
Segmentation select_from_tallies(std::span<const VoteTally> tallies, const VotingConfig& cfg);

/// Lift 2D masks to a 3D segmentation by multi-view voting.
/// Throws EmptyViews when no views are given.
Segmentation vote(const GaussianCloud& cloud, std::span<const View> views,
                  const VotingConfig& cfg);

/// Plain-text ".seg" files: one selected index per line, sorted ascending.
Segmentation load_segmentation(const std::filesystem::path& path);
void save_segmentation(const Segmentation& seg, const std::filesystem::path& path);

/// Throws DimensionMismatch if any index is out of range for the cloud.
void validate_segmentation(const Segmentation& seg, const GaussianCloud& cloud);

}  // namespace avs3d

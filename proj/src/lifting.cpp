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

#include "avs3d/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "avs3d/error.hpp"

namespace avs3d {

ProjectionClass classify_projection(const CameraPose& pose, const MaskImage& mask,
                                    const Vec3& center) {
    if (mask.width != pose.width || mask.height != pose.height)
        throw DimensionMismatch("mask is " + std::to_string(mask.width) + "x" +
                                std::to_string(mask.height) + " but pose expects " +
                                std::to_string(pose.width) + "x" +
                                std::to_string(pose.height));
    const ProjectionResult pr = project_point(pose, center);
    if (!pr.in_view()) return ProjectionClass::OutOfView;
    const int x = static_cast<int>(std::floor(pr.u));
    const int y = static_cast<int>(std::floor(pr.v));
    return mask.at(x, y) ? ProjectionClass::InMask : ProjectionClass::InBackground;
}

std::vector<VoteTally> tally_votes(const GaussianCloud& cloud, std::span<const View> views) {
    if (views.empty()) throw EmptyViews("voting requires at least one view");
    std::vector<VoteTally> tallies(cloud.size());
    for (const View& view : views) {
        for (std::size_t g = 0; g < cloud.size(); ++g) {
            switch (classify_projection(view.pose, view.mask, cloud[g].center)) {
                case ProjectionClass::InMask: ++tallies[g].in_mask; break;
                case ProjectionClass::InBackground: ++tallies[g].in_background; break;
                case ProjectionClass::OutOfView: ++tallies[g].out_of_view; break;
            }
        }
    }
    return tallies;
}

Segmentation select_from_tallies(std::span<const VoteTally> tallies, const VotingConfig& cfg) {
    Segmentation seg;
    for (std::size_t g = 0; g < tallies.size(); ++g) {
        const int visible = tallies[g].visible();
        if (visible < 1) continue;  // never voted on: no evidence
        const double ratio = static_cast<double>(tallies[g].in_mask) / visible;
        if (ratio >= cfg.tau_voting) seg.selected.push_back(static_cast<std::uint32_t>(g));
    }
    return seg;
}

Segmentation vote(const GaussianCloud& cloud, std::span<const View> views,
                  const VotingConfig& cfg) {
    return select_from_tallies(tally_votes(cloud, views), cfg);
}

Segmentation load_segmentation(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open segmentation file: " + path.string());
    Segmentation seg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const unsigned long value = std::stoul(line);
            seg.selected.push_back(static_cast<std::uint32_t>(value));
        } catch (const std::exception&) {
            throw ParseError("bad segmentation index '" + line + "' on line " +
                             std::to_string(line_no));
        }
    }
    if (in.bad()) throw IoError("read failed: " + path.string());
    std::sort(seg.selected.begin(), seg.selected.end());
    seg.selected.erase(std::unique(seg.selected.begin(), seg.selected.end()),
                       seg.selected.end());
    return seg;
}

void save_segmentation(const Segmentation& seg, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (const std::uint32_t idx : seg.selected) out << idx << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

void validate_segmentation(const Segmentation& seg, const GaussianCloud& cloud) {
    for (const std::uint32_t idx : seg.selected)
        if (idx >= cloud.size())
            throw DimensionMismatch("segmentation index " + std::to_string(idx) +
                                    " out of range for cloud of size " +
                                    std::to_string(cloud.size()));
}

}  // namespace avs3d

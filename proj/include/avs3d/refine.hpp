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
#include <span>
#include <vector>

#include "avs3d/gaussian.hpp"
#include "avs3d/geometry.hpp"
#include "avs3d/intensity.hpp"
#include "avs3d/lifting.hpp"

namespace avs3d {

struct RefinementConfig {
    double eps = 0.04;               // DBSCAN radius, world units
    int min_points = 6;              // DBSCAN core threshold (includes self)
    double tau_ref = 0.85;           // normalized intensity threshold
    double volume_sigma_factor = 0.5;
};

struct Cluster {
    std::vector<std::uint32_t> members;  // sorted indices into the clustered point list
    Vec3 centroid = Vec3::Zero();        // unweighted mean of member centers
    double volume = 0.0;                 // world units^3

    std::uint32_t lowest_member() const { return members.front(); }
};

/// DBSCAN output. Clusters and noise partition the input index set.
struct ClusterSet {
    std::vector<Cluster> clusters;
    std::vector<std::uint32_t> noise;
};

/// Standard DBSCAN over 3D points. A point is core iff at least min_points
/// points (itself included) lie within distance eps; clusters are connected
/// components of core points under the eps relation plus reachable border
/// points. A border point reachable from several clusters goes to the cluster
/// of its lowest-index core neighbor, which makes the labeling deterministic.
/// Clusters are emitted in order of their lowest core index.
/// Throws InvalidParams for eps <= 0 or min_points < 1.
ClusterSet dbscan(std::span<const Vec3> points, double eps, int min_points);

/// Volume of the axis-aligned bounding box of the centers, each extent
/// floored at eps so degenerate clusters stay comparable.
/// Throws EmptyCluster.
double cluster_volume(std::span<const Vec3> member_centers, double eps);

/// Discards every cluster whose volume is strictly greater than
/// mu + volume_sigma_factor * sigma (population statistics over all cluster
/// volumes). If the rule would discard everything, all clusters are kept.
/// Throws NoClusters.
ClusterSet filter_by_volume(const ClusterSet& cs, double volume_sigma_factor);

/// Mean of Gaussian centers weighted by normalized intensity, over Gaussians
/// with normalized intensity strictly above tau_ref.
/// Throws NoQualifyingGaussians when nothing qualifies.
Vec3 audio_intensity_center(const GaussianCloud& cloud, const AudioIntensityMap& map,
                            double tau_ref);

/// Cluster whose centroid is nearest to `center`; exact ties go to the
/// cluster containing the lowest member index. Throws NoClusters.
const Cluster& select_cluster(const ClusterSet& cs, const Vec3& center);

struct RefineResult {
    Segmentation segmentation;
    bool refined = false;  // false when DBSCAN found no clusters (fallback)
};

/// Audio-informed refinement: cluster the segmented Gaussian centers, drop
/// oversized clusters, locate the audio intensity center and keep the nearest
/// cluster. When DBSCAN labels everything noise the input segmentation is
/// returned unchanged with refined = false.
/// Throws EmptySegmentation on empty input; propagates NoQualifyingGaussians.
RefineResult refine(const GaussianCloud& cloud, const Segmentation& seg,
                    const AudioIntensityMap& map, const RefinementConfig& cfg);

}  // namespace avs3d

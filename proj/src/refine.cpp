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

#include "avs3d/refine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_map>

#include "avs3d/error.hpp"

namespace avs3d {

namespace {

// Uniform grid with cell size eps: neighbor candidates of a point live in the
// 27 cells around it. Cell member lists keep insertion (= index) order, so
// neighbor enumeration is deterministic.
class NeighborGrid {
public:
    NeighborGrid(std::span<const Vec3> points, double eps)
        : points_(points), inv_eps_(1.0 / eps), eps_sq_(eps * eps) {
        cells_.reserve(points.size());
        for (std::uint32_t i = 0; i < points.size(); ++i)
            cells_[key_of(points[i])].push_back(i);
    }

    template <typename Fn>
    void for_each_neighbor(std::uint32_t i, Fn&& fn) const {
        const Key center = key_of(points_[i]);
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    const auto it =
                        cells_.find({center.x + dx, center.y + dy, center.z + dz});
                    if (it == cells_.end()) continue;
                    for (const std::uint32_t j : it->second)
                        if ((points_[i] - points_[j]).squaredNorm() <= eps_sq_) fn(j);
                }
    }

    int neighbor_count(std::uint32_t i) const {
        int count = 0;
        for_each_neighbor(i, [&](std::uint32_t) { ++count; });
        return count;
    }

private:
    struct Key {
        std::int64_t x, y, z;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::size_t h = std::hash<std::int64_t>()(k.x);
            h = h * 0x9e3779b97f4a7c15ull + std::hash<std::int64_t>()(k.y);
            h = h * 0x9e3779b97f4a7c15ull + std::hash<std::int64_t>()(k.z);
            return h;
        }
    };

    Key key_of(const Vec3& p) const {
        return {static_cast<std::int64_t>(std::floor(p.x() * inv_eps_)),
                static_cast<std::int64_t>(std::floor(p.y() * inv_eps_)),
                static_cast<std::int64_t>(std::floor(p.z() * inv_eps_))};
    }

    std::span<const Vec3> points_;
    double inv_eps_;
    double eps_sq_;
    std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> cells_;
};

Cluster make_cluster(std::vector<std::uint32_t> members, std::span<const Vec3> points,
                     double eps) {
    Cluster cluster;
    std::sort(members.begin(), members.end());
    cluster.members = std::move(members);
    Vec3 sum = Vec3::Zero();
    std::vector<Vec3> centers;
    centers.reserve(cluster.members.size());
    for (const std::uint32_t idx : cluster.members) {
        sum += points[idx];
        centers.push_back(points[idx]);
    }
    cluster.centroid = sum / static_cast<double>(cluster.members.size());
    cluster.volume = cluster_volume(centers, eps);
    return cluster;
}

}  // namespace

ClusterSet dbscan(std::span<const Vec3> points, double eps, int min_points) {
    if (eps <= 0.0) throw InvalidParams("dbscan eps must be positive");
    if (min_points < 1) throw InvalidParams("dbscan min_points must be at least 1");

    ClusterSet result;
    const std::uint32_t n = static_cast<std::uint32_t>(points.size());
    if (n == 0) return result;

    const NeighborGrid grid(points, eps);

    std::vector<bool> core(n, false);
    for (std::uint32_t i = 0; i < n; ++i)
        core[i] = grid.neighbor_count(i) >= min_points;

    constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> label(n, kUnassigned);
    std::vector<std::vector<std::uint32_t>> members;

    // Core components: BFS from the lowest unvisited core point, following
    // only core-to-core eps edges. Cluster ids come out ordered by lowest
    // core index.
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!core[i] || label[i] != kUnassigned) continue;
        const std::uint32_t cluster_id = static_cast<std::uint32_t>(members.size());
        members.emplace_back();
        std::queue<std::uint32_t> frontier;
        label[i] = cluster_id;
        frontier.push(i);
        while (!frontier.empty()) {
            const std::uint32_t p = frontier.front();
            frontier.pop();
            members[cluster_id].push_back(p);
            grid.for_each_neighbor(p, [&](std::uint32_t q) {
                if (core[q] && label[q] == kUnassigned) {
                    label[q] = cluster_id;
                    frontier.push(q);
                }
            });
        }
    }

    // Border points attach to the cluster of their lowest-index core neighbor.
    for (std::uint32_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        std::uint32_t claiming = kUnassigned;
        grid.for_each_neighbor(i, [&](std::uint32_t q) {
            if (core[q] && q < claiming) claiming = q;
        });
        if (claiming != kUnassigned) {
            label[i] = label[claiming];
            members[label[i]].push_back(i);
        }
    }

    for (auto& cluster_members : members)
        result.clusters.push_back(make_cluster(std::move(cluster_members), points, eps));
    for (std::uint32_t i = 0; i < n; ++i)
        if (label[i] == kUnassigned) result.noise.push_back(i);
    return result;
}

double cluster_volume(std::span<const Vec3> member_centers, double eps) {
    if (member_centers.empty())
        throw EmptyCluster("cluster volume of an empty member list");
    Vec3 lo = member_centers.front();
    Vec3 hi = member_centers.front();
    for (const Vec3& c : member_centers) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    const Vec3 extent = (hi - lo).cwiseMax(eps);
    return extent.x() * extent.y() * extent.z();
}

ClusterSet filter_by_volume(const ClusterSet& cs, double volume_sigma_factor) {
    if (cs.clusters.empty())
        throw NoClusters("volume filter requires at least one cluster");

    const double n = static_cast<double>(cs.clusters.size());
    double mean = 0.0;
    for (const Cluster& c : cs.clusters) mean += c.volume;
    mean /= n;
    double variance = 0.0;
    for (const Cluster& c : cs.clusters) {
        const double d = c.volume - mean;
        variance += d * d;
    }
    variance /= n;  // population statistics: a single cluster has sigma = 0
    const double threshold = mean + volume_sigma_factor * std::sqrt(variance);

    ClusterSet out;
    out.noise = cs.noise;
    for (const Cluster& c : cs.clusters)
        if (!(c.volume > threshold)) out.clusters.push_back(c);
    if (out.clusters.empty()) out.clusters = cs.clusters;  // never empty the set
    return out;
}

Vec3 audio_intensity_center(const GaussianCloud& cloud, const AudioIntensityMap& map,
                            double tau_ref) {
    if (map.normalized.size() != cloud.size())
        throw DimensionMismatch("intensity map size does not match cloud size");
    Vec3 weighted_sum = Vec3::Zero();
    double weight_sum = 0.0;
    for (std::size_t g = 0; g < cloud.size(); ++g) {
        const double w = map.normalized[g];
        if (w > tau_ref) {
            weighted_sum += w * cloud[g].center;
            weight_sum += w;
        }
    }
    if (weight_sum <= 0.0)
        throw NoQualifyingGaussians("no Gaussian has normalized intensity above " +
                                    std::to_string(tau_ref));
    return weighted_sum / weight_sum;
}

const Cluster& select_cluster(const ClusterSet& cs, const Vec3& center) {
    if (cs.clusters.empty())
        throw NoClusters("cluster selection requires at least one cluster");
    const Cluster* best = &cs.clusters.front();
    double best_dist = (best->centroid - center).squaredNorm();
    for (const Cluster& c : cs.clusters) {
        const double d = (c.centroid - center).squaredNorm();
        if (d < best_dist ||
            (d == best_dist && c.lowest_member() < best->lowest_member())) {
            best = &c;
            best_dist = d;
        }
    }
    return *best;
}

RefineResult refine(const GaussianCloud& cloud, const Segmentation& seg,
                    const AudioIntensityMap& map, const RefinementConfig& cfg) {
    if (seg.empty()) throw EmptySegmentation("refinement requires a non-empty segmentation");
    validate_segmentation(seg, cloud);

    std::vector<Vec3> centers;
    centers.reserve(seg.size());
    for (const std::uint32_t idx : seg.selected) centers.push_back(cloud[idx].center);

    const ClusterSet clusters = dbscan(centers, cfg.eps, cfg.min_points);
    if (clusters.clusters.empty()) return {seg, false};  // all noise: keep the input

    const ClusterSet kept = filter_by_volume(clusters, cfg.volume_sigma_factor);
    const Vec3 center = audio_intensity_center(cloud, map, cfg.tau_ref);
    const Cluster& chosen = select_cluster(kept, center);

    RefineResult result;
    result.refined = true;
    result.segmentation.selected.reserve(chosen.members.size());
    for (const std::uint32_t local : chosen.members)
        result.segmentation.selected.push_back(seg.selected[local]);
    return result;
}

}  // namespace avs3d

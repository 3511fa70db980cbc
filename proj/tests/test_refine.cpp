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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "avs3d/error.hpp"
#include "avs3d/refine.hpp"
#include "avs3d/rng.hpp"
#include "oracles.hpp"

using namespace avs3d;

namespace {

std::vector<Vec3> blob(SeededRng& rng, const Vec3& center, double radius, int count) {
    std::vector<Vec3> points;
    for (int i = 0; i < count; ++i)
        points.push_back(center + radius * Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                                rng.uniform(-1, 1)));
    return points;
}

GaussianCloud cloud_of(const std::vector<Vec3>& centers) {
    GaussianCloud cloud;
    for (const Vec3& c : centers) {
        Gaussian g;
        g.center = c;
        cloud.gaussians.push_back(g);
    }
    return cloud;
}

ClusterSet clusters_with_volumes(const std::vector<double>& volumes) {
    ClusterSet cs;
    for (std::size_t i = 0; i < volumes.size(); ++i) {
        Cluster c;
        c.members = {static_cast<std::uint32_t>(i)};
        c.volume = volumes[i];
        cs.clusters.push_back(c);
    }
    return cs;
}

}  // namespace

TEST_CASE("two well-separated blobs form two clusters with no noise") {
    SeededRng rng(1);
    std::vector<Vec3> points = blob(rng, Vec3::Zero(), 0.01, 10);
    const auto second = blob(rng, Vec3(1, 0, 0), 0.01, 10);
    points.insert(points.end(), second.begin(), second.end());

    const ClusterSet cs = dbscan(points, 0.04, 6);
    CHECK(cs.clusters.size() == 2);
    CHECK(cs.noise.empty());
    CHECK(oracle::canonical(cs) == oracle::brute_dbscan(points, 0.04, 6));
}

TEST_CASE("isolated points below min_points become noise") {
    const std::vector<Vec3> points = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    const ClusterSet cs = dbscan(points, 0.04, 6);
    CHECK(cs.clusters.empty());
    CHECK(cs.noise == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("empty input gives an empty cluster set") {
    const ClusterSet cs = dbscan({}, 0.04, 6);
    CHECK(cs.clusters.empty());
    CHECK(cs.noise.empty());
}

TEST_CASE("invalid dbscan parameters throw") {
    const std::vector<Vec3> points = {Vec3::Zero()};
    CHECK_THROWS_AS(dbscan(points, 0.0, 6), InvalidParams);
    CHECK_THROWS_AS(dbscan(points, -1.0, 6), InvalidParams);
    CHECK_THROWS_AS(dbscan(points, 0.04, 0), InvalidParams);
}

TEST_CASE("dbscan matches the brute-force oracle on random instances") {
    SeededRng rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform() * 199);
        const double eps = rng.uniform(0.02, 0.4);
        const int min_points = 1 + static_cast<int>(rng.uniform() * 7);
        std::vector<Vec3> points;
        // mixture of clumps and free points so all three labels appear
        const int clumps = 1 + static_cast<int>(rng.uniform() * 4);
        std::vector<Vec3> clump_centers;
        for (int c = 0; c < clumps; ++c)
            clump_centers.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                       rng.uniform(-1, 1));
        for (int i = 0; i < n; ++i) {
            if (rng.uniform() < 0.7) {
                const Vec3& c = clump_centers[static_cast<std::size_t>(
                    rng.uniform() * clumps)];
                points.push_back(c + eps * Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                                rng.uniform(-1, 1)));
            } else {
                points.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                    rng.uniform(-1, 1));
            }
        }
        CHECK(oracle::canonical(dbscan(points, eps, min_points)) ==
              oracle::brute_dbscan(points, eps, min_points));
    }
}

TEST_CASE("dbscan core partition is stable under input permutation") {
    SeededRng rng(555);
    std::vector<Vec3> points;
    for (int i = 0; i < 120; ++i)
        points.emplace_back(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                            rng.uniform(-0.3, 0.3));
    const ClusterSet base = dbscan(points, 0.05, 4);

    std::vector<std::uint32_t> perm(points.size());
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform() * i)]);
    std::vector<Vec3> shuffled(points.size());
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled[perm[i]] = points[i];
    const ClusterSet permuted = dbscan(shuffled, 0.05, 4);

    // noise is a metric property: map back through the permutation
    std::vector<std::uint32_t> mapped_noise;
    for (const std::uint32_t idx : permuted.noise)
        for (std::size_t orig = 0; orig < perm.size(); ++orig)
            if (perm[orig] == idx) mapped_noise.push_back(static_cast<std::uint32_t>(orig));
    std::sort(mapped_noise.begin(), mapped_noise.end());
    CHECK(mapped_noise == base.noise);
    CHECK(permuted.clusters.size() == base.clusters.size());
}

TEST_CASE("cluster volume floors each extent at eps") {
    const double eps = 0.04;
    CHECK(cluster_volume(std::vector<Vec3>{Vec3::Zero()}, eps) ==
          doctest::Approx(6.4e-5).epsilon(1e-9));  // eps^3
    const std::vector<Vec3> box = {Vec3(0, 0, 0), Vec3(1, 2, 0.5)};
    CHECK(cluster_volume(box, eps) == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<Vec3> planar = {Vec3(0, 0, 0), Vec3(1, 1, 0)};
    CHECK(cluster_volume(planar, eps) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK_THROWS_AS(cluster_volume({}, eps), EmptyCluster);
}

TEST_CASE("volume filter removes clusters above mu + 0.5 sigma") {
    const ClusterSet cs = clusters_with_volumes({1, 1, 1, 10});
    // mu = 3.25, sigma = sqrt(15.1875) ~ 3.8971, threshold ~ 5.1986
    const ClusterSet kept = filter_by_volume(cs, 0.5);
    REQUIRE(kept.clusters.size() == 3);
    for (const Cluster& c : kept.clusters) CHECK(c.volume == doctest::Approx(1.0));
}

TEST_CASE("volume filter keeps degenerate cases intact") {
    SUBCASE("single cluster: sigma 0, not strictly greater") {
        const ClusterSet kept = filter_by_volume(clusters_with_volumes({3.0}), 0.5);
        CHECK(kept.clusters.size() == 1);
    }
    SUBCASE("equal volumes all survive") {
        const ClusterSet kept = filter_by_volume(clusters_with_volumes({2.0, 2.0}), 0.5);
        CHECK(kept.clusters.size() == 2);
    }
    SUBCASE("no clusters throws") {
        CHECK_THROWS_AS(filter_by_volume(ClusterSet{}, 0.5), NoClusters);
    }
}

TEST_CASE("volume filter never empties the cluster list") {
    // factor so negative every cluster is above the threshold
    const ClusterSet kept = filter_by_volume(clusters_with_volumes({1.0, 2.0}), -10.0);
    CHECK(kept.clusters.size() == 2);
}

TEST_CASE("audio intensity center is the normalized weighted mean") {
    const GaussianCloud cloud = cloud_of({Vec3(0, 0, 0), Vec3(2, 0, 0)});
    AudioIntensityMap map;
    map.raw = {1.0, 0.9};
    map.normalized = {1.0, 0.9};
    const Vec3 center = audio_intensity_center(cloud, map, 0.85);
    CHECK(center.x() == doctest::Approx(0.94737).epsilon(1e-4));  // 1.8 / 1.9
    CHECK(center.y() == 0.0);

    SUBCASE("single qualifying gaussian is its own center") {
        map.normalized = {1.0, 0.5};
        CHECK(audio_intensity_center(cloud, map, 0.85).isApprox(Vec3(0, 0, 0)));
    }
    SUBCASE("all-zero map throws NoQualifyingGaussians") {
        map.raw = {0.0, 0.0};
        map.normalized = {0.0, 0.0};
        CHECK_THROWS_AS(audio_intensity_center(cloud, map, 0.85), NoQualifyingGaussians);
    }
}

TEST_CASE("select_cluster picks the nearest centroid with index tie-break") {
    ClusterSet cs;
    Cluster a;
    a.members = {0, 1};
    a.centroid = Vec3(0, 0, 0);
    Cluster b;
    b.members = {2, 3};
    b.centroid = Vec3(5, 0, 0);
    cs.clusters = {a, b};

    CHECK(select_cluster(cs, Vec3(1, 0, 0)).members == a.members);
    CHECK(select_cluster(cs, Vec3(4.9, 0, 0)).members == b.members);
    // equidistant: lowest member index wins
    CHECK(select_cluster(cs, Vec3(2.5, 0, 0)).members == a.members);
    CHECK_THROWS_AS(select_cluster(ClusterSet{}, Vec3::Zero()), NoClusters);

    SUBCASE("single cluster is returned for any center") {
        cs.clusters = {b};
        CHECK(select_cluster(cs, Vec3(-100, 0, 0)).members == b.members);
    }
}

TEST_CASE("refine keeps the blob nearest the audio center") {
    SeededRng rng(42);
    const auto blob_a = blob(rng, Vec3(-0.8, 0, 0), 0.015, 40);
    const auto blob_b = blob(rng, Vec3(0.8, 0, 0), 0.015, 40);
    std::vector<Vec3> centers = blob_a;
    centers.insert(centers.end(), blob_b.begin(), blob_b.end());
    const GaussianCloud cloud = cloud_of(centers);

    Segmentation seg;
    seg.selected.resize(cloud.size());
    std::iota(seg.selected.begin(), seg.selected.end(), 0u);

    AudioIntensityMap map;
    map.raw.assign(cloud.size(), 0.0);
    map.normalized.assign(cloud.size(), 0.0);
    for (std::size_t g = 0; g < 40; ++g) map.normalized[g] = map.raw[g] = 1.0;

    const RefineResult result = refine(cloud, seg, map, {});
    CHECK(result.refined);
    REQUIRE(result.segmentation.size() == 40);
    for (const std::uint32_t idx : result.segmentation.selected) CHECK(idx < 40);
}

TEST_CASE("refine of a single tight cluster is the identity") {
    SeededRng rng(43);
    const GaussianCloud cloud = cloud_of(blob(rng, Vec3::Zero(), 0.015, 30));
    Segmentation seg;
    seg.selected.resize(cloud.size());
    std::iota(seg.selected.begin(), seg.selected.end(), 0u);
    AudioIntensityMap map;
    map.raw.assign(cloud.size(), 1.0);
    map.normalized.assign(cloud.size(), 1.0);

    const RefineResult result = refine(cloud, seg, map, {});
    CHECK(result.refined);
    CHECK(result.segmentation.selected == seg.selected);
}

TEST_CASE("refine drops stragglers labeled noise by dbscan") {
    SeededRng rng(44);
    std::vector<Vec3> centers = blob(rng, Vec3::Zero(), 0.015, 30);
    centers.push_back(Vec3(3, 0, 0));
    centers.push_back(Vec3(0, 3, 0));
    const GaussianCloud cloud = cloud_of(centers);
    Segmentation seg;
    seg.selected.resize(cloud.size());
    std::iota(seg.selected.begin(), seg.selected.end(), 0u);
    AudioIntensityMap map;
    map.raw.assign(cloud.size(), 1.0);
    map.normalized.assign(cloud.size(), 1.0);

    const RefineResult result = refine(cloud, seg, map, {});
    CHECK(result.refined);
    CHECK(result.segmentation.size() == 30);
}

TEST_CASE("all-noise segmentation falls back to the unrefined input") {
    const GaussianCloud cloud =
        cloud_of({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)});
    Segmentation seg;
    seg.selected = {0, 1, 2, 3};
    AudioIntensityMap map;
    map.raw.assign(4, 1.0);
    map.normalized.assign(4, 1.0);

    const RefineResult result = refine(cloud, seg, map, {});
    CHECK_FALSE(result.refined);
    CHECK(result.segmentation.selected == seg.selected);
}

TEST_CASE("refine output is always a subset of the input segmentation") {
    SeededRng rng(45);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec3> centers;
        const int blobs = 1 + static_cast<int>(rng.uniform() * 3);
        for (int b = 0; b < blobs; ++b) {
            const auto pts = blob(rng,
                                  Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                       rng.uniform(-1, 1)),
                                  0.02, 10 + static_cast<int>(rng.uniform() * 20));
            centers.insert(centers.end(), pts.begin(), pts.end());
        }
        const GaussianCloud cloud = cloud_of(centers);
        Segmentation seg;
        for (std::uint32_t i = 0; i < cloud.size(); ++i)
            if (rng.uniform() < 0.8) seg.selected.push_back(i);
        if (seg.empty()) continue;
        AudioIntensityMap map;
        map.raw.assign(cloud.size(), 0.0);
        map.normalized.assign(cloud.size(), 0.0);
        const std::size_t hot = static_cast<std::size_t>(rng.uniform() * cloud.size());
        map.raw[hot] = map.normalized[hot] = 1.0;

        const RefineResult result = refine(cloud, seg, map, {});
        CHECK(std::includes(seg.selected.begin(), seg.selected.end(),
                            result.segmentation.selected.begin(),
                            result.segmentation.selected.end()));
    }
}

TEST_CASE("refine requires a non-empty segmentation and propagates intensity errors") {
    const GaussianCloud cloud = cloud_of({Vec3::Zero()});
    AudioIntensityMap map;
    map.raw.assign(1, 0.0);
    map.normalized.assign(1, 0.0);

    CHECK_THROWS_AS(refine(cloud, Segmentation{}, map, {}), EmptySegmentation);

    SeededRng rng(46);
    const GaussianCloud dense = cloud_of(blob(rng, Vec3::Zero(), 0.01, 20));
    Segmentation seg;
    seg.selected.resize(dense.size());
    std::iota(seg.selected.begin(), seg.selected.end(), 0u);
    AudioIntensityMap zero;
    zero.raw.assign(dense.size(), 0.0);
    zero.normalized.assign(dense.size(), 0.0);
    CHECK_THROWS_AS(refine(dense, seg, zero, {}), NoQualifyingGaussians);
}

TEST_CASE("rigid motions move the audio center and keep the same members") {
    SeededRng rng(77);
    // two tight instance blobs (volumes floor to eps^3, so they tie) plus a
    // large background blob the volume filter discards on both sides
    const auto blob_a = blob(rng, Vec3(-0.5, 0.2, 1.0), 0.01, 25);
    const auto blob_b = blob(rng, Vec3(0.7, -0.1, 0.4), 0.01, 25);
    std::vector<Vec3> centers = blob_a;
    centers.insert(centers.end(), blob_b.begin(), blob_b.end());
    const auto backdrop = blob(rng, Vec3(0.1, 1.5, -0.5), 0.08, 150);
    centers.insert(centers.end(), backdrop.begin(), backdrop.end());

    AudioIntensityMap map;
    map.raw.assign(centers.size(), 0.0);
    map.normalized.assign(centers.size(), 0.0);
    for (std::size_t g = 0; g < 25; ++g) map.normalized[g] = map.raw[g] = 1.0;

    Segmentation seg;
    seg.selected.resize(centers.size());
    std::iota(seg.selected.begin(), seg.selected.end(), 0u);

    const Vec3 base_center = audio_intensity_center(cloud_of(centers), map, 0.85);
    const RefineResult base = refine(cloud_of(centers), seg, map, {});

    const Eigen::AngleAxisd rot(0.73, Vec3(1, 2, 3).normalized());
    const Vec3 shift(4.0, -2.0, 1.5);
    std::vector<Vec3> moved;
    for (const Vec3& c : centers) moved.push_back(rot * c + shift);

    const Vec3 moved_center = audio_intensity_center(cloud_of(moved), map, 0.85);
    CHECK((moved_center - (rot * base_center + shift)).norm() < 1e-9);
    const RefineResult moved_result = refine(cloud_of(moved), seg, map, {});
    CHECK(moved_result.segmentation.selected == base.segmentation.selected);
}

TEST_CASE("cluster selection ignores uniform intensity gain") {
    SeededRng rng(78);
    std::vector<Vec3> centers = blob(rng, Vec3(-0.6, 0, 0), 0.02, 20);
    const auto other = blob(rng, Vec3(0.6, 0, 0), 0.02, 20);
    centers.insert(centers.end(), other.begin(), other.end());
    const GaussianCloud cloud = cloud_of(centers);

    AudioIntensityMap map;
    map.raw.assign(centers.size(), 0.0);
    for (std::size_t g = 0; g < 20; ++g) map.raw[g] = rng.uniform(0.5, 1.0);
    const double peak = *std::max_element(map.raw.begin(), map.raw.end());
    map.normalized.resize(map.raw.size());
    for (std::size_t g = 0; g < map.raw.size(); ++g) map.normalized[g] = map.raw[g] / peak;

    Segmentation seg;
    seg.selected.resize(centers.size());
    std::iota(seg.selected.begin(), seg.selected.end(), 0u);
    const RefineResult base = refine(cloud, seg, map, {});

    AudioIntensityMap scaled = map;
    for (double& v : scaled.raw) v *= 37.5;
    const double speak = *std::max_element(scaled.raw.begin(), scaled.raw.end());
    for (std::size_t g = 0; g < scaled.raw.size(); ++g)
        scaled.normalized[g] = scaled.raw[g] / speak;
    const RefineResult rescaled = refine(cloud, seg, scaled, {});
    CHECK(rescaled.segmentation.selected == base.segmentation.selected);
}

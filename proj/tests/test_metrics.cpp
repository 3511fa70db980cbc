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
#include <numeric>

#include "avs3d/error.hpp"
#include "avs3d/metrics.hpp"
#include "avs3d/rng.hpp"
#include "oracles.hpp"

using namespace avs3d;

namespace {

MaskImage mask_with(int w, int h, const std::vector<std::pair<int, int>>& ones) {
    MaskImage mask = MaskImage::zeros(w, h);
    for (const auto& [x, y] : ones) mask.set(x, y, 1);
    return mask;
}

MaskImage random_mask(SeededRng& rng, int w, int h, double density) {
    MaskImage mask = MaskImage::zeros(w, h);
    for (auto& px : mask.data) px = rng.uniform() < density ? 1 : 0;
    return mask;
}

}  // namespace

TEST_CASE("iou basics") {
    const MaskImage a = mask_with(8, 8, {{0, 0}, {1, 1}, {2, 2}});
    CHECK(iou(a, a) == 1.0);

    const MaskImage disjoint = mask_with(8, 8, {{5, 5}, {6, 6}});
    CHECK(iou(a, disjoint) == 0.0);

    // gt has 100 pixels, pred covers 50 of them and nothing else
    MaskImage gt = MaskImage::zeros(16, 16);
    MaskImage pred = MaskImage::zeros(16, 16);
    for (int i = 0; i < 100; ++i) gt.data[i] = 1;
    for (int i = 0; i < 50; ++i) pred.data[i] = 1;
    CHECK(iou(pred, gt) == doctest::Approx(0.5).epsilon(1e-12));

    const MaskImage empty = MaskImage::zeros(8, 8);
    CHECK(iou(empty, empty) == 1.0);
    CHECK_THROWS_AS(iou(a, MaskImage::zeros(4, 4)), DimensionMismatch);
}

TEST_CASE("fscore basics") {
    const MaskImage gt = mask_with(8, 8, {{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    CHECK(fscore(gt, gt, {}) == 1.0);

    // precision 1, recall 0.5, beta^2 0.3 -> 1.3*0.5/0.8 = 0.8125
    const MaskImage half = mask_with(8, 8, {{0, 0}, {1, 0}});
    CHECK(fscore(half, gt, {}) == doctest::Approx(0.8125).epsilon(1e-12));

    const MaskImage empty = MaskImage::zeros(8, 8);
    CHECK(fscore(empty, gt, {}) == 0.0);
    CHECK(fscore(empty, empty, {}) == 1.0);
}

TEST_CASE("iou is symmetric, fscore is not") {
    const MaskImage gt = mask_with(8, 8, {{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    const MaskImage half = mask_with(8, 8, {{0, 0}, {1, 0}});
    CHECK(iou(half, gt) == iou(gt, half));
    // swapping roles swaps precision and recall; beta^2 != 1 weights them apart
    CHECK(fscore(half, gt, {}) != fscore(gt, half, {}));
    CHECK(fscore(gt, half, {}) == doctest::Approx(1.3 * 0.5 / (0.3 * 0.5 + 1.0)));
}

TEST_CASE("metrics agree with the pixel-loop oracle on random pairs") {
    SeededRng rng(314);
    for (int trial = 0; trial < 50; ++trial) {
        const MaskImage pred = random_mask(rng, 24, 18, rng.uniform(0.0, 1.0));
        const MaskImage gt = random_mask(rng, 24, 18, rng.uniform(0.0, 1.0));
        const auto expected = oracle::pixel_scores(pred, gt, 0.3);
        CHECK(iou(pred, gt) == doctest::Approx(expected.iou).epsilon(1e-9));
        CHECK(fscore(pred, gt, {}) == doctest::Approx(expected.fscore).epsilon(1e-9));
    }
}

TEST_CASE("scores are invariant under a shared pixel permutation") {
    SeededRng rng(271);
    const int w = 12, h = 9;
    const MaskImage pred = random_mask(rng, w, h, 0.4);
    const MaskImage gt = random_mask(rng, w, h, 0.3);

    std::vector<std::size_t> perm(static_cast<std::size_t>(w) * h);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform() * i)]);

    MaskImage pred_p = MaskImage::zeros(w, h);
    MaskImage gt_p = MaskImage::zeros(w, h);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        pred_p.data[perm[i]] = pred.data[i];
        gt_p.data[perm[i]] = gt.data[i];
    }
    CHECK(iou(pred_p, gt_p) == doctest::Approx(iou(pred, gt)).epsilon(1e-12));
    CHECK(fscore(pred_p, gt_p, {}) == doctest::Approx(fscore(pred, gt, {})).epsilon(1e-12));
}

TEST_CASE("evaluate averages per-frame scores in frame order") {
    GaussianCloud cloud;
    Gaussian g;
    g.center = Vec3(0, 0, 2);
    g.scale = Vec3::Constant(0.2);
    g.opacity = 1.0;
    cloud.gaussians.push_back(g);
    Segmentation seg;
    seg.selected = {0};

    CameraPose pose;
    pose.fx = pose.fy = 60;
    pose.cx = pose.cy = 32;
    pose.width = pose.height = 64;

    // frame 0: gt equals the rendering (IoU 1); frame 1: empty gt (IoU 0)
    const MaskImage rendered = render_mask(cloud, seg, pose, {});
    REQUIRE(rendered.count_ones() > 0);
    std::vector<EvalFrame> frames;
    frames.push_back({pose, rendered});
    frames.push_back({pose, MaskImage::zeros(64, 64)});

    const Metrics metrics = evaluate(cloud, seg, frames, {}, {});
    REQUIRE(metrics.per_frame_iou.size() == 2);
    CHECK(metrics.per_frame_iou[0] == 1.0);
    CHECK(metrics.per_frame_iou[1] == 0.0);
    CHECK(metrics.miou == doctest::Approx(0.5));
    CHECK(metrics.fscore == doctest::Approx(0.5));

    // frame order only permutes the per-frame lists
    std::vector<EvalFrame> reversed = {frames[1], frames[0]};
    const Metrics swapped = evaluate(cloud, seg, reversed, {}, {});
    CHECK(swapped.miou == doctest::Approx(metrics.miou));
    CHECK(swapped.fscore == doctest::Approx(metrics.fscore));
    CHECK(swapped.per_frame_iou[1] == metrics.per_frame_iou[0]);

    CHECK_THROWS_AS(evaluate(cloud, seg, {}, {}, {}), EmptyFrames);
}

TEST_CASE("train/test split holds out every eighth frame") {
    const SplitIndices split = split_train_test(120);
    CHECK(split.train.size() == 105);
    CHECK(split.test.size() == 15);
    CHECK(split.test.front() == 0);
    CHECK(split.test[1] == 8);

    const SplitIndices tiny = split_train_test(8);
    CHECK(tiny.test == std::vector<std::size_t>{0});
    CHECK(tiny.train.size() == 7);

    const SplitIndices sixteen = split_train_test(16);
    CHECK(sixteen.test == std::vector<std::size_t>{0, 8});

    CHECK_THROWS_AS(split_train_test(7), TooFewFrames);
}

TEST_CASE("metrics json carries the required keys") {
    Metrics metrics;
    metrics.miou = 0.5;
    metrics.fscore = 0.25;
    metrics.per_frame_iou = {1.0, 0.0};
    metrics.per_frame_fscore = {0.5, 0.0};
    const std::vector<int> frames = {0, 8};
    const std::string doc = metrics_json(metrics, frames, "test");
    CHECK(doc.find("\"miou\"") != std::string::npos);
    CHECK(doc.find("\"fscore\"") != std::string::npos);
    CHECK(doc.find("\"per_frame_iou\"") != std::string::npos);
}

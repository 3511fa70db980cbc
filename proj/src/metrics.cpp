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

#include "avs3d/metrics.hpp"

#include <json.hpp>
#include <string>

#include "avs3d/error.hpp"

namespace avs3d {

namespace {

void require_same_size(const MaskImage& pred, const MaskImage& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw DimensionMismatch("mask sizes differ: " + std::to_string(pred.width) + "x" +
                                std::to_string(pred.height) + " vs " +
                                std::to_string(gt.width) + "x" + std::to_string(gt.height));
}

struct PixelCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

PixelCounts count_pixels(const MaskImage& pred, const MaskImage& gt) {
    PixelCounts counts;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const bool p = pred.data[i] != 0;
        const bool g = gt.data[i] != 0;
        counts.tp += p && g;
        counts.fp += p && !g;
        counts.fn += !p && g;
    }
    return counts;
}

}  // namespace

double iou(const MaskImage& pred, const MaskImage& gt) {
    require_same_size(pred, gt);
    const PixelCounts c = count_pixels(pred, gt);
    const std::size_t union_size = c.tp + c.fp + c.fn;
    if (union_size == 0) return 1.0;  // both empty: perfect agreement on absence
    return static_cast<double>(c.tp) / static_cast<double>(union_size);
}

double fscore(const MaskImage& pred, const MaskImage& gt, const EvalConfig& cfg) {
    require_same_size(pred, gt);
    const PixelCounts c = count_pixels(pred, gt);
    if (c.tp == 0) return (c.fp == 0 && c.fn == 0) ? 1.0 : 0.0;
    const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double b2 = cfg.beta_squared;
    return (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

Metrics evaluate(const GaussianCloud& cloud, const Segmentation& seg,
                 std::span<const EvalFrame> frames, const RenderConfig& render_cfg,
                 const EvalConfig& eval_cfg) {
    if (frames.empty()) throw EmptyFrames("evaluation requires at least one frame");

    Metrics metrics;
    metrics.per_frame_iou.reserve(frames.size());
    metrics.per_frame_fscore.reserve(frames.size());
    for (const EvalFrame& frame : frames) {
        const MaskImage pred = render_mask(cloud, seg, frame.pose, render_cfg);
        metrics.per_frame_iou.push_back(iou(pred, frame.gt));
        metrics.per_frame_fscore.push_back(fscore(pred, frame.gt, eval_cfg));
    }

    double iou_sum = 0.0;
    double f_sum = 0.0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        iou_sum += metrics.per_frame_iou[i];
        f_sum += metrics.per_frame_fscore[i];
    }
    metrics.miou = iou_sum / static_cast<double>(frames.size());
    metrics.fscore = f_sum / static_cast<double>(frames.size());
    return metrics;
}

SplitIndices split_train_test(std::size_t frame_count) {
    if (frame_count < 8)
        throw TooFewFrames("7:1 split requires at least 8 frames, got " +
                           std::to_string(frame_count));
    SplitIndices split;
    for (std::size_t i = 0; i < frame_count; ++i)
        (i % 8 == 0 ? split.test : split.train).push_back(i);
    return split;
}

std::string metrics_json(const Metrics& metrics, std::span<const int> frame_ids,
                         const std::string& split_name) {
    nlohmann::json doc;
    doc["miou"] = metrics.miou;
    doc["fscore"] = metrics.fscore;
    doc["per_frame_iou"] = metrics.per_frame_iou;
    doc["per_frame_fscore"] = metrics.per_frame_fscore;
    doc["frames"] = std::vector<int>(frame_ids.begin(), frame_ids.end());
    doc["eval_split"] = split_name;
    return doc.dump(2) + "\n";
}

}  // namespace avs3d

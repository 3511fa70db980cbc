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
#include <optional>
#include <string>
#include <vector>

#include "avs3d/camera.hpp"
#include "avs3d/gaussian.hpp"
#include "avs3d/geometry.hpp"
#include "avs3d/intensity.hpp"
#include "avs3d/mask.hpp"
#include "avs3d/render.hpp"
#include "avs3d/rng.hpp"

namespace avs3d {

// Synthetic desk-scale scenes: a seeded generator for Gaussian clouds, agent
// trajectories, ground-truth masks and a lateralized binaural RMS signal, so
// the full pipeline can be exercised and scored without any captured data.

struct ObjectSpec {
    Vec3 center = Vec3::Zero();
    Vec3 extent = Vec3::Zero();  // half-extent of the sampling box, per axis
    int gaussian_count = 0;
    bool emitting = false;
};

struct SceneSpec {
    std::vector<ObjectSpec> objects;  // exactly one must be emitting
    int clutter_count = 0;
    Bounds3 room_box;
    std::uint64_t seed = 0;
    double gaussian_scale = 0.02;    // isotropic default, world units
    double gaussian_opacity = 0.95;  // post-activation
};

struct TrajectorySpec {
    int frame_count = 120;
    std::vector<Vec3> waypoints;     // piecewise-linear path, >= 1 point
    std::optional<Vec3> look_at;     // nullopt: look along the path
};

struct CameraIntrinsics {
    double fx = 256.0;
    double fy = 256.0;
    double cx = 128.0;
    double cy = 128.0;
    int width = 256;
    int height = 256;
};

/// Intensity-only binaural emitter model. At distance d and lateral sine s
/// (component of the unit direction to the emitter along the agent's right
/// axis) the channel RMS pair is
///   base = amplitude / (1 + d)
///   R_r = base * (1 + lateral_gain * s) / 2
///   R_l = base * (1 - lateral_gain * s) / 2
/// plus optional clamped Gaussian noise.
struct BinauralModel {
    double amplitude = 1.0;
    double lateral_gain = 0.8;  // in [0, 1]
    double noise_std = 0.0;
};

/// Frame-level corruptions applied to the exported "predicted" masks to
/// emulate an imperfect 2D segmentation front-end: the silent instances get
/// painted in, whole frames go missing, masks dilate, random blobs appear.
struct CorruptionSpec {
    bool paint_silent = true;
    double miss_probability = 0.0;  // per-frame chance of an empty prediction
    int dilate_px = 0;
    int blob_count = 0;
    double blob_radius_px = 6.0;
};

struct SyntheticScene {
    GaussianCloud cloud;
    std::vector<int> labels;  // per Gaussian: object id, or -1 for clutter

    std::vector<std::uint32_t> object_indices(int object_id) const;
};

/// Samples object Gaussians from a truncated normal inside each object's
/// extent box and clutter uniformly in the room box; reproducible from the
/// spec seed. Throws InvalidSpec (no objects, not exactly one emitter,
/// non-positive extents or counts).
SyntheticScene generate_scene(const SceneSpec& spec);

/// Poses along the waypoint path at frame_count evenly spaced arc-length
/// fractions. Throws InvalidSpec (frame_count < 8, no waypoints).
std::vector<CameraPose> generate_trajectory(const TrajectorySpec& traj,
                                            const CameraIntrinsics& camera);

/// Core RMS formula at lateral sine s and distance d.
std::pair<double, double> binaural_rms_pair(double lateral_sine, double distance,
                                            const BinauralModel& model);

/// RMS observation for an agent pose and emitter position. Noise draws come
/// from noise_rng when provided and noise_std > 0.
RmsObservation synthesize_binaural_rms(const CameraPose& pose, const Vec3& emitter,
                                       const BinauralModel& model,
                                       SeededRng* noise_rng = nullptr);

/// Ground-truth mask of an object: render_mask over its index set.
/// Throws EmptySegmentation when the index set is empty.
MaskImage render_gt_mask(const GaussianCloud& cloud,
                         const std::vector<std::uint32_t>& object_indices,
                         const CameraPose& pose, const RenderConfig& cfg);

struct DatasetSpec {
    SceneSpec scene;
    TrajectorySpec trajectory;
    CameraIntrinsics camera;
    BinauralModel binaural;
    CorruptionSpec corruption;
    RenderConfig render;
};

DatasetSpec parse_dataset_spec(const std::string& json_text);
DatasetSpec load_dataset_spec(const std::filesystem::path& path);

/// Fully materialized dataset, kept in memory.
struct Dataset {
    SyntheticScene scene;
    std::vector<CameraPose> poses;
    std::vector<MaskImage> gt_masks;    // emitting object only
    std::vector<MaskImage> pred_masks;  // corrupted predictions
    std::vector<RmsObservation> observations;
    Vec3 emitter = Vec3::Zero();
    int emitter_id = -1;
    std::vector<std::uint32_t> emitter_indices;
    std::vector<std::uint32_t> silent_indices;  // all non-emitting object Gaussians
};

Dataset build_dataset(const DatasetSpec& spec);

/// Writes the dataset under out_dir: scene.ply, poses.json, gt_masks/,
/// pred_masks/, audio/ (constant-amplitude stereo WAVs reproducing each
/// frame's RMS pair exactly) and manifest.json listing every path plus the
/// seed. Returns the manifest path. Throws IoError on unwritable output.
std::filesystem::path export_dataset(const DatasetSpec& spec,
                                     const std::filesystem::path& out_dir);

}  // namespace avs3d

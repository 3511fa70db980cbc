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

#include "avs3d/gaussian.hpp"
#include "avs3d/geometry.hpp"

namespace avs3d {

/// Pinhole camera with world-from-camera extrinsics. The camera frame is the
/// COLMAP/3D-GS convention: x right, y down, z forward. Columns of
/// rotation_wc are the camera axes expressed in world coordinates, so
/// col(0) is also the agent's right axis for binaural side tests.
struct CameraPose {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;
    Mat3 rotation_wc = Mat3::Identity();
    Vec3 position = Vec3::Zero();

    Vec3 right_axis() const { return rotation_wc.col(0); }
    Vec3 forward_axis() const { return rotation_wc.col(2); }
};

enum class Visibility { InView, OutOfView };

struct ProjectionResult {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;  // camera-frame z, world units
    Visibility visibility = Visibility::OutOfView;

    bool in_view() const { return visibility == Visibility::InView; }
};

/// Throws InvalidParams unless rotation_wc is orthonormal (within 1e-6) with
/// determinant +1 and the image size is positive.
void validate_pose(const CameraPose& pose);

/// Projects a world point. InView requires positive depth and a pixel inside
/// [0, width) x [0, height). Total function: never throws.
ProjectionResult project_point(const CameraPose& pose, const Vec3& point);

/// Screen-space 2x2 covariance of a Gaussian: the world covariance
/// R diag(scale^2) R^T pushed through the rotation into the camera frame and
/// the perspective Jacobian at the center. Throws NotVisible when the center
/// projects OutOfView.
Mat2 project_covariance(const CameraPose& pose, const Gaussian& g);

/// Inverse of project_point for InView results: world point at pixel (u, v)
/// and camera-frame depth z.
Vec3 unproject_pixel(const CameraPose& pose, double u, double v, double depth);

/// Pose at `position` looking toward `target` with the image upright under
/// `world_up` (y down in the image maps to -world_up). Falls back to an
/// arbitrary horizontal axis when the view direction is parallel to
/// world_up.
CameraPose look_at_pose(const Vec3& position, const Vec3& target, const Vec3& world_up,
                        double fx, double fy, double cx, double cy, int width, int height);

}  // namespace avs3d

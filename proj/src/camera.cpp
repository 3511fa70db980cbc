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

#include "avs3d/camera.hpp"

#include <cmath>
#include <limits>

#include "avs3d/error.hpp"

namespace avs3d {

void validate_pose(const CameraPose& pose) {
    if (pose.width <= 0 || pose.height <= 0)
        throw InvalidParams("camera image size must be positive");
    const Mat3 gram = pose.rotation_wc.transpose() * pose.rotation_wc;
    if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6)
        throw InvalidParams("rotation_wc is not orthonormal");
    if (std::abs(pose.rotation_wc.determinant() - 1.0) > 1e-6)
        throw InvalidParams("rotation_wc determinant is not +1");
}

ProjectionResult project_point(const CameraPose& pose, const Vec3& point) {
    const Vec3 pc = pose.rotation_wc.transpose() * (point - pose.position);
    ProjectionResult res;
    res.depth = pc.z();
    if (pc.z() <= 0.0) {
        res.u = std::numeric_limits<double>::quiet_NaN();
        res.v = std::numeric_limits<double>::quiet_NaN();
        res.visibility = Visibility::OutOfView;
        return res;
    }
    res.u = pose.fx * pc.x() / pc.z() + pose.cx;
    res.v = pose.fy * pc.y() / pc.z() + pose.cy;
    const bool inside = res.u >= 0.0 && res.u < static_cast<double>(pose.width) &&
                        res.v >= 0.0 && res.v < static_cast<double>(pose.height);
    res.visibility = inside ? Visibility::InView : Visibility::OutOfView;
    return res;
}

Mat2 project_covariance(const CameraPose& pose, const Gaussian& g) {
    const ProjectionResult pr = project_point(pose, g.center);
    if (!pr.in_view())
        throw NotVisible("gaussian center projects out of view");

    const Mat3 world_to_cam = pose.rotation_wc.transpose();
    const Vec3 pc = world_to_cam * (g.center - pose.position);
    const double z = pc.z();

    Eigen::Matrix<double, 2, 3> jacobian;
    jacobian << pose.fx / z, 0.0, -pose.fx * pc.x() / (z * z),
                0.0, pose.fy / z, -pose.fy * pc.y() / (z * z);

    const Mat3 rot = g.rotation.toRotationMatrix();
    const Mat3 cov_world =
        rot * g.scale.cwiseProduct(g.scale).asDiagonal() * rot.transpose();

    const Eigen::Matrix<double, 2, 3> m = jacobian * world_to_cam;
    Mat2 cov = m * cov_world * m.transpose();
    // kill the asymmetry left by rounding
    cov(0, 1) = cov(1, 0) = 0.5 * (cov(0, 1) + cov(1, 0));
    return cov;
}

Vec3 unproject_pixel(const CameraPose& pose, double u, double v, double depth) {
    const Vec3 pc(depth * (u - pose.cx) / pose.fx, depth * (v - pose.cy) / pose.fy, depth);
    return pose.rotation_wc * pc + pose.position;
}

CameraPose look_at_pose(const Vec3& position, const Vec3& target, const Vec3& world_up,
                        double fx, double fy, double cx, double cy, int width, int height) {
    Vec3 forward = target - position;
    const double norm = forward.norm();
    if (norm < 1e-12) throw InvalidParams("look_at target coincides with camera position");
    forward /= norm;

    Vec3 right = forward.cross(world_up);
    if (right.norm() < 1e-9) {
        // view direction parallel to up: any horizontal axis works
        const Vec3 fallback = std::abs(forward.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
        right = forward.cross(fallback);
    }
    right.normalize();
    const Vec3 down = forward.cross(right);

    CameraPose pose;
    pose.fx = fx;
    pose.fy = fy;
    pose.cx = cx;
    pose.cy = cy;
    pose.width = width;
    pose.height = height;
    pose.rotation_wc.col(0) = right;
    pose.rotation_wc.col(1) = down;
    pose.rotation_wc.col(2) = forward;
    pose.position = position;
    return pose;
}

}  // namespace avs3d

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

#include "avs3d/geometry.hpp"

namespace avs3d {

/// One anisotropic 3D Gaussian, stored post-activation:
/// scales are strictly positive world units (the file stores log-scale),
/// opacity is in [0, 1] (the file stores the logit), the quaternion is unit.
struct Gaussian {
    Vec3 center = Vec3::Zero();
    Vec3 scale = Vec3::Ones();
    Quat rotation = Quat::Identity();  // (w, x, y, z)
    double opacity = 1.0;
    Vec3 color_dc = Vec3::Zero();  // SH DC term; carried through, never read
};

/// An ordered Gaussian scene. Index order is load order and is the identity
/// of a Gaussian everywhere in the pipeline; the cloud is immutable after
/// load and every operation on it is pure.
struct GaussianCloud {
    std::vector<Gaussian> gaussians;

    std::size_t size() const { return gaussians.size(); }
    bool empty() const { return gaussians.empty(); }
    const Gaussian& operator[](std::size_t i) const { return gaussians[i]; }
};

/// Parses a binary little-endian 3D-GS PLY. The vertex element must carry
/// x, y, z, f_dc_0..2, opacity, scale_0..2 and rot_0..3; any other scalar
/// property (normals, f_rest_*) is skipped. Stored scales are exponentiated,
/// stored opacities pass through the logistic function and quaternions are
/// normalized.
///
/// Throws ParseError (malformed header, with byte offset), MissingProperty,
/// or UnexpectedEof (truncated body).
GaussianCloud parse_gsplat_ply(std::span<const std::uint8_t> bytes);

/// Serializes a cloud with the same property layout parse_gsplat_ply reads
/// (x y z f_dc_0..2 opacity scale_0..2 rot_0..3, float32 little-endian),
/// inverting the activations.
std::vector<std::uint8_t> write_gsplat_ply(const GaussianCloud& cloud);

GaussianCloud load_gsplat_ply(const std::filesystem::path& path);
void save_gsplat_ply(const GaussianCloud& cloud, const std::filesystem::path& path);

/// New cloud holding the given Gaussians, in index order.
GaussianCloud subcloud(const GaussianCloud& cloud, std::span<const std::uint32_t> indices);

}  // namespace avs3d

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

namespace avs3d {

/// Row-major binary image: 0 background, 1 object.
struct MaskImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    static MaskImage zeros(int width, int height) {
        MaskImage m;
        m.width = width;
        m.height = height;
        m.data.assign(static_cast<std::size_t>(width) * height, 0);
        return m;
    }

    std::uint8_t at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    void set(int x, int y, std::uint8_t value) {
        data[static_cast<std::size_t>(y) * width + x] = value;
    }

    std::size_t count_ones() const;
    bool empty_mask() const { return count_ones() == 0; }
};

/// Binary PGM (P5, maxval <= 255); stored values threshold at 128 on load.
MaskImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const MaskImage& mask);  // 0 -> 0, 1 -> 255

MaskImage load_pgm(const std::filesystem::path& path);
void save_pgm(const MaskImage& mask, const std::filesystem::path& path);

/// Filename for frame i under the "mask_%05d.pgm" convention.
std::string mask_filename(int frame);

}  // namespace avs3d

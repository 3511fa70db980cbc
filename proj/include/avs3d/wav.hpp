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
#include <string>
#include <utility>
#include <vector>

namespace avs3d {

/// De-interleaved stereo audio, amplitudes in [-1, 1].
struct StereoClip {
    int sample_rate = 0;
    std::vector<double> left;
    std::vector<double> right;

    std::size_t frames() const { return left.size(); }
};

/// Decodes a RIFF/WAVE container holding 2-channel PCM 16-bit or IEEE
/// float 32-bit audio. 16-bit samples are scaled by 1/32768.
/// Throws UnsupportedFormat (codec/channel count) or CorruptContainer.
StereoClip decode_wav(std::span<const std::uint8_t> bytes);

/// IEEE float 32-bit stereo WAV.
std::vector<std::uint8_t> encode_wav_float32(const StereoClip& clip);

StereoClip load_wav(const std::filesystem::path& path);
void save_wav(const StereoClip& clip, const std::filesystem::path& path);

/// Per-channel root mean square (R_l, R_r). Throws EmptyClip.
std::pair<double, double> channel_rms(const StereoClip& clip);

/// Filename for frame i under the "audio_%05d.wav" convention.
std::string audio_filename(int frame);

}  // namespace avs3d

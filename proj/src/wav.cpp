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

#include "avs3d/wav.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "avs3d/error.hpp"

namespace avs3d {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;

template <typename T>
T read_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
    if (offset + sizeof(T) > bytes.size())
        throw CorruptContainer("WAV data ends inside a field");
    T value;
    std::memcpy(&value, bytes.data() + offset, sizeof(T));
    return value;
}

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T value) {
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

bool tag_is(std::span<const std::uint8_t> bytes, std::size_t offset, const char* tag) {
    return offset + 4 <= bytes.size() && std::memcmp(bytes.data() + offset, tag, 4) == 0;
}

}  // namespace

StereoClip decode_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE"))
        throw CorruptContainer("not a RIFF/WAVE container");

    const std::uint32_t riff_size = read_le<std::uint32_t>(bytes, 4);
    if (static_cast<std::size_t>(riff_size) + 8 > bytes.size())
        throw CorruptContainer("RIFF size exceeds file size");

    bool have_fmt = false;
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits_per_sample = 0;
    std::size_t data_offset = 0;
    std::size_t data_size = 0;
    bool have_data = false;

    std::size_t cursor = 12;
    while (cursor + 8 <= bytes.size()) {
        const std::size_t chunk_size = read_le<std::uint32_t>(bytes, cursor + 4);
        const std::size_t payload = cursor + 8;
        if (payload + chunk_size > bytes.size())
            throw CorruptContainer("chunk overruns container");
        if (tag_is(bytes, cursor, "fmt ")) {
            if (chunk_size < 16) throw CorruptContainer("fmt chunk too small");
            format = read_le<std::uint16_t>(bytes, payload);
            channels = read_le<std::uint16_t>(bytes, payload + 2);
            sample_rate = read_le<std::uint32_t>(bytes, payload + 4);
            bits_per_sample = read_le<std::uint16_t>(bytes, payload + 14);
            have_fmt = true;
        } else if (tag_is(bytes, cursor, "data")) {
            data_offset = payload;
            data_size = chunk_size;
            have_data = true;
        }
        cursor = payload + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt) throw CorruptContainer("missing fmt chunk");
    if (!have_data) throw CorruptContainer("missing data chunk");
    if (channels != 2)
        throw UnsupportedFormat("expected 2 channels, got " + std::to_string(channels));
    if (sample_rate == 0) throw CorruptContainer("zero sample rate");

    const bool pcm16 = format == kFormatPcm && bits_per_sample == 16;
    const bool float32 = format == kFormatIeeeFloat && bits_per_sample == 32;
    if (!pcm16 && !float32)
        throw UnsupportedFormat("expected PCM 16-bit or IEEE float 32-bit, got format " +
                                std::to_string(format) + " at " +
                                std::to_string(bits_per_sample) + " bits");

    const std::size_t bytes_per_sample = bits_per_sample / 8;
    const std::size_t block = bytes_per_sample * 2;
    if (data_size % block != 0)
        throw CorruptContainer("data size is not a whole number of stereo frames");
    const std::size_t frames = data_size / block;

    StereoClip clip;
    clip.sample_rate = static_cast<int>(sample_rate);
    clip.left.resize(frames);
    clip.right.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        const std::size_t at = data_offset + i * block;
        if (pcm16) {
            clip.left[i] = read_le<std::int16_t>(bytes, at) / 32768.0;
            clip.right[i] = read_le<std::int16_t>(bytes, at + 2) / 32768.0;
        } else {
            clip.left[i] = read_le<float>(bytes, at);
            clip.right[i] = read_le<float>(bytes, at + 4);
        }
    }
    return clip;
}

std::vector<std::uint8_t> encode_wav_float32(const StereoClip& clip) {
    const std::uint32_t frames = static_cast<std::uint32_t>(clip.frames());
    const std::uint32_t data_size = frames * 8;
    // RIFF(4) + fmt chunk(8+18) + fact chunk(8+4) + data chunk header(8)
    const std::uint32_t riff_size = 4 + 26 + 12 + 8 + data_size;

    std::vector<std::uint8_t> out;
    out.reserve(riff_size + 8);
    const char* riff = "RIFF";
    out.insert(out.end(), riff, riff + 4);
    append_le(out, riff_size);
    const char* wave = "WAVE";
    out.insert(out.end(), wave, wave + 4);

    const char* fmt = "fmt ";
    out.insert(out.end(), fmt, fmt + 4);
    append_le<std::uint32_t>(out, 18);
    append_le<std::uint16_t>(out, kFormatIeeeFloat);
    append_le<std::uint16_t>(out, 2);  // channels
    append_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.sample_rate));
    append_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.sample_rate) * 8);
    append_le<std::uint16_t>(out, 8);   // block align
    append_le<std::uint16_t>(out, 32);  // bits per sample
    append_le<std::uint16_t>(out, 0);   // cbSize

    const char* fact = "fact";
    out.insert(out.end(), fact, fact + 4);
    append_le<std::uint32_t>(out, 4);
    append_le<std::uint32_t>(out, frames);

    const char* data = "data";
    out.insert(out.end(), data, data + 4);
    append_le(out, data_size);
    for (std::uint32_t i = 0; i < frames; ++i) {
        append_le(out, static_cast<float>(clip.left[i]));
        append_le(out, static_cast<float>(clip.right[i]));
    }
    return out;
}

StereoClip load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open WAV file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return decode_wav(bytes);
}

void save_wav(const StereoClip& clip, const std::filesystem::path& path) {
    const auto bytes = encode_wav_float32(clip);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::pair<double, double> channel_rms(const StereoClip& clip) {
    if (clip.frames() == 0) throw EmptyClip("cannot compute RMS of an empty clip");
    double sum_l = 0.0;
    double sum_r = 0.0;
    for (std::size_t i = 0; i < clip.frames(); ++i) {
        sum_l += clip.left[i] * clip.left[i];
        sum_r += clip.right[i] * clip.right[i];
    }
    const double n = static_cast<double>(clip.frames());
    return {std::sqrt(sum_l / n), std::sqrt(sum_r / n)};
}

std::string audio_filename(int frame) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "audio_%05d.wav", frame);
    return buf;
}

}  // namespace avs3d

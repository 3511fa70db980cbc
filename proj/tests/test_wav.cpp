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

#include <cmath>
#include <cstring>
#include <vector>

#include "avs3d/error.hpp"
#include "avs3d/wav.hpp"

using namespace avs3d;

namespace {

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T value) {
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

void append_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

// Minimal PCM16 WAV with the given interleaved samples.
std::vector<std::uint8_t> make_pcm16_wav(const std::vector<std::int16_t>& interleaved,
                                         std::uint16_t channels = 2,
                                         std::uint32_t rate = 44100) {
    std::vector<std::uint8_t> bytes;
    const std::uint32_t data_size = static_cast<std::uint32_t>(interleaved.size() * 2);
    append_tag(bytes, "RIFF");
    append_le<std::uint32_t>(bytes, 4 + 24 + 8 + data_size);
    append_tag(bytes, "WAVE");
    append_tag(bytes, "fmt ");
    append_le<std::uint32_t>(bytes, 16);
    append_le<std::uint16_t>(bytes, 1);  // PCM
    append_le<std::uint16_t>(bytes, channels);
    append_le<std::uint32_t>(bytes, rate);
    append_le<std::uint32_t>(bytes, rate * channels * 2);
    append_le<std::uint16_t>(bytes, static_cast<std::uint16_t>(channels * 2));
    append_le<std::uint16_t>(bytes, 16);
    append_tag(bytes, "data");
    append_le<std::uint32_t>(bytes, data_size);
    for (const std::int16_t s : interleaved) append_le(bytes, s);
    return bytes;
}

}  // namespace

TEST_CASE("pcm16 stereo decodes with 1/32768 scaling") {
    std::vector<std::int16_t> interleaved;
    for (int i = 0; i < 44100; ++i) {
        interleaved.push_back(16384);  // left: 0.5
        interleaved.push_back(-32768); // right: -1.0
    }
    const StereoClip clip = decode_wav(make_pcm16_wav(interleaved));
    CHECK(clip.sample_rate == 44100);
    REQUIRE(clip.frames() == 44100);
    CHECK(clip.left[0] == doctest::Approx(0.5));
    CHECK(clip.right[0] == doctest::Approx(-1.0));
}

TEST_CASE("mono input is an unsupported format") {
    const auto bytes = make_pcm16_wav({0, 0, 0, 0}, 1);
    CHECK_THROWS_AS(decode_wav(bytes), UnsupportedFormat);
}

TEST_CASE("corrupt containers are rejected") {
    SUBCASE("bad magic") {
        std::vector<std::uint8_t> bytes = make_pcm16_wav({0, 0});
        bytes[0] = 'X';
        CHECK_THROWS_AS(decode_wav(bytes), CorruptContainer);
    }
    SUBCASE("chunk overruns file") {
        std::vector<std::uint8_t> bytes = make_pcm16_wav({0, 0, 0, 0});
        bytes.resize(bytes.size() - 2);  // truncate inside the data chunk
        CHECK_THROWS_AS(decode_wav(bytes), CorruptContainer);
    }
    SUBCASE("missing data chunk") {
        std::vector<std::uint8_t> bytes;
        append_tag(bytes, "RIFF");
        append_le<std::uint32_t>(bytes, 4);
        append_tag(bytes, "WAVE");
        CHECK_THROWS_AS(decode_wav(bytes), CorruptContainer);
    }
}

TEST_CASE("float32 wav round trips through encode/decode") {
    StereoClip clip;
    clip.sample_rate = 44100;
    for (int i = 0; i < 1000; ++i) {
        clip.left.push_back(std::sin(0.01 * i) * 0.25);
        clip.right.push_back(std::cos(0.01 * i) * 0.5);
    }
    const StereoClip decoded = decode_wav(encode_wav_float32(clip));
    CHECK(decoded.sample_rate == 44100);
    REQUIRE(decoded.frames() == clip.frames());
    for (std::size_t i = 0; i < clip.frames(); ++i) {
        CHECK(decoded.left[i] == doctest::Approx(clip.left[i]).epsilon(1e-6));
        CHECK(decoded.right[i] == doctest::Approx(clip.right[i]).epsilon(1e-6));
    }
}

TEST_CASE("channel_rms handles silence, sines and constants") {
    StereoClip clip;
    clip.sample_rate = 44100;

    SUBCASE("silence") {
        clip.left.assign(1000, 0.0);
        clip.right.assign(1000, 0.0);
        const auto [l, r] = channel_rms(clip);
        CHECK(l == 0.0);
        CHECK(r == 0.0);
    }
    SUBCASE("unit sine over whole periods vs silent channel") {
        const int periods = 100;
        const int samples_per_period = 441;
        for (int i = 0; i < periods * samples_per_period; ++i) {
            clip.left.push_back(
                std::sin(2.0 * 3.14159265358979323846 * i / samples_per_period));
            clip.right.push_back(0.0);
        }
        const auto [l, r] = channel_rms(clip);
        CHECK(l == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));  // 0.70711
        CHECK(r == 0.0);
    }
    SUBCASE("constant 0.5") {
        clip.left.assign(500, 0.5);
        clip.right.assign(500, -0.25);
        const auto [l, r] = channel_rms(clip);
        CHECK(l == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(r == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("empty clip throws EmptyClip") {
    StereoClip clip;
    clip.sample_rate = 44100;
    CHECK_THROWS_AS(channel_rms(clip), EmptyClip);
}

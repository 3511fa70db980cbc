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

#include "avs3d/mask.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <string>

#include "avs3d/error.hpp"

namespace avs3d {

namespace {

// Reads the next PGM header token, skipping whitespace and '#' comments.
// Returns the token and advances the cursor.
std::string next_pgm_token(std::span<const std::uint8_t> bytes, std::size_t& cursor) {
    while (cursor < bytes.size()) {
        const char c = static_cast<char>(bytes[cursor]);
        if (c == '#') {
            while (cursor < bytes.size() && bytes[cursor] != '\n') ++cursor;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++cursor;
        } else {
            break;
        }
    }
    const std::size_t start = cursor;
    while (cursor < bytes.size() &&
           !std::isspace(static_cast<unsigned char>(bytes[cursor])) &&
           bytes[cursor] != '#')
        ++cursor;
    if (start == cursor) throw ParseError("truncated PGM header", start);
    return std::string(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                       bytes.begin() + static_cast<std::ptrdiff_t>(cursor));
}

int parse_pgm_int(const std::string& token, std::size_t offset) {
    try {
        return std::stoi(token);
    } catch (const std::exception&) {
        throw ParseError("bad PGM header value '" + token + "'", offset);
    }
}

}  // namespace

std::size_t MaskImage::count_ones() const {
    return static_cast<std::size_t>(std::count(data.begin(), data.end(), 1));
}

MaskImage decode_pgm(std::span<const std::uint8_t> bytes) {
    std::size_t cursor = 0;
    if (next_pgm_token(bytes, cursor) != "P5")
        throw ParseError("not a binary PGM (expected P5 magic)", 0);
    const int width = parse_pgm_int(next_pgm_token(bytes, cursor), cursor);
    const int height = parse_pgm_int(next_pgm_token(bytes, cursor), cursor);
    const int maxval = parse_pgm_int(next_pgm_token(bytes, cursor), cursor);
    if (width <= 0 || height <= 0)
        throw ParseError("non-positive PGM dimensions", cursor);
    if (maxval <= 0 || maxval > 255)
        throw ParseError("unsupported PGM maxval " + std::to_string(maxval), cursor);
    ++cursor;  // single whitespace byte after maxval

    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    if (bytes.size() - cursor < pixels)
        throw UnexpectedEof("PGM pixel data truncated");

    MaskImage mask;
    mask.width = width;
    mask.height = height;
    mask.data.resize(pixels);
    for (std::size_t i = 0; i < pixels; ++i)
        mask.data[i] = bytes[cursor + i] >= 128 ? 1 : 0;
    return mask;
}

std::vector<std::uint8_t> encode_pgm(const MaskImage& mask) {
    std::string header = "P5\n" + std::to_string(mask.width) + " " +
                         std::to_string(mask.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + mask.data.size());
    for (const std::uint8_t v : mask.data) out.push_back(v ? 255 : 0);
    return out;
}

MaskImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mask file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return decode_pgm(bytes);
}

void save_pgm(const MaskImage& mask, const std::filesystem::path& path) {
    const auto bytes = encode_pgm(mask);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::string mask_filename(int frame) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "mask_%05d.pgm", frame);
    return buf;
}

}  // namespace avs3d

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

#include "avs3d/gaussian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "avs3d/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary PLY and WAV I/O assume a little-endian host");

namespace avs3d {

namespace {

constexpr double kOpacityClamp = 1e-12;

struct PlyProperty {
    std::string name;
    std::size_t size = 0;
    bool is_float = false;   // float32
    bool is_double = false;  // float64
    std::size_t offset = 0;  // byte offset within a record
};

std::size_t scalar_size(const std::string& type) {
    if (type == "char" || type == "int8" || type == "uchar" || type == "uint8") return 1;
    if (type == "short" || type == "int16" || type == "ushort" || type == "uint16") return 2;
    if (type == "int" || type == "int32" || type == "uint" || type == "uint32" ||
        type == "float" || type == "float32")
        return 4;
    if (type == "double" || type == "float64") return 8;
    return 0;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

double read_property(const std::uint8_t* record, const PlyProperty& prop) {
    if (prop.is_float) {
        float f;
        std::memcpy(&f, record + prop.offset, sizeof(f));
        return static_cast<double>(f);
    }
    double d;
    std::memcpy(&d, record + prop.offset, sizeof(d));
    return d;
}

void append_f32(std::vector<std::uint8_t>& out, double value) {
    const float f = static_cast<float>(value);
    std::uint8_t buf[4];
    std::memcpy(buf, &f, sizeof(f));
    out.insert(out.end(), buf, buf + 4);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) {
    const double c = std::clamp(p, kOpacityClamp, 1.0 - kOpacityClamp);
    return std::log(c / (1.0 - c));
}

}  // namespace

GaussianCloud parse_gsplat_ply(std::span<const std::uint8_t> bytes) {
    std::size_t cursor = 0;
    bool format_seen = false;
    bool vertex_seen = false;
    bool header_done = false;
    std::size_t vertex_count = 0;
    std::vector<PlyProperty> properties;
    std::size_t record_size = 0;

    auto next_line = [&](std::size_t& line_start) -> std::string {
        line_start = cursor;
        const auto begin = bytes.begin() + static_cast<std::ptrdiff_t>(cursor);
        const auto nl = std::find(begin, bytes.end(), static_cast<std::uint8_t>('\n'));
        if (nl == bytes.end())
            throw ParseError("unterminated header line", line_start);
        std::string line(begin, nl);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        cursor = static_cast<std::size_t>(nl - bytes.begin()) + 1;
        return line;
    };

    std::size_t line_start = 0;
    if (bytes.empty() || next_line(line_start) != "ply")
        throw ParseError("not a PLY file: missing 'ply' magic", 0);

    while (!header_done) {
        if (cursor >= bytes.size())
            throw ParseError("header ended before 'end_header'", cursor);
        const std::string line = next_line(line_start);
        const auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0] == "comment" || tokens[0] == "obj_info") continue;

        if (tokens[0] == "format") {
            if (tokens.size() < 3 || tokens[1] != "binary_little_endian" || tokens[2] != "1.0")
                throw ParseError("unsupported PLY format '" + line + "'", line_start);
            format_seen = true;
        } else if (tokens[0] == "element") {
            if (tokens.size() != 3)
                throw ParseError("malformed element declaration '" + line + "'", line_start);
            if (tokens[1] != "vertex")
                throw ParseError("unsupported element '" + tokens[1] + "'", line_start);
            if (vertex_seen)
                throw ParseError("duplicate vertex element", line_start);
            try {
                vertex_count = std::stoull(tokens[2]);
            } catch (const std::exception&) {
                throw ParseError("bad vertex count '" + tokens[2] + "'", line_start);
            }
            vertex_seen = true;
        } else if (tokens[0] == "property") {
            if (!vertex_seen)
                throw ParseError("property declared before any element", line_start);
            if (tokens.size() >= 2 && tokens[1] == "list")
                throw ParseError("list properties are not supported", line_start);
            if (tokens.size() != 3)
                throw ParseError("malformed property declaration '" + line + "'", line_start);
            PlyProperty prop;
            prop.name = tokens[2];
            prop.size = scalar_size(tokens[1]);
            if (prop.size == 0)
                throw ParseError("unknown property type '" + tokens[1] + "'", line_start);
            prop.is_float = (tokens[1] == "float" || tokens[1] == "float32");
            prop.is_double = (tokens[1] == "double" || tokens[1] == "float64");
            prop.offset = record_size;
            record_size += prop.size;
            properties.push_back(std::move(prop));
        } else if (tokens[0] == "end_header") {
            header_done = true;
        } else {
            throw ParseError("unrecognized header line '" + line + "'", line_start);
        }
    }

    if (!format_seen) throw ParseError("header missing format declaration", cursor);
    if (!vertex_seen) throw ParseError("header missing vertex element", cursor);

    static const char* const kRequired[] = {"x",       "y",       "z",     "f_dc_0",
                                            "f_dc_1",  "f_dc_2",  "opacity", "scale_0",
                                            "scale_1", "scale_2", "rot_0", "rot_1",
                                            "rot_2",   "rot_3"};
    const PlyProperty* req[std::size(kRequired)] = {};
    for (std::size_t i = 0; i < std::size(kRequired); ++i) {
        for (const auto& prop : properties) {
            if (prop.name == kRequired[i]) {
                if (!prop.is_float && !prop.is_double)
                    throw ParseError("property '" + prop.name + "' must be float or double",
                                     cursor);
                req[i] = &prop;
                break;
            }
        }
        if (req[i] == nullptr) throw MissingProperty(kRequired[i]);
    }

    const std::size_t body_bytes = bytes.size() - cursor;
    const std::size_t needed = vertex_count * record_size;
    if (body_bytes < needed)
        throw UnexpectedEof("vertex data truncated: need " + std::to_string(needed) +
                            " bytes, have " + std::to_string(body_bytes));

    GaussianCloud cloud;
    cloud.gaussians.reserve(vertex_count);
    for (std::size_t i = 0; i < vertex_count; ++i) {
        const std::uint8_t* record = bytes.data() + cursor + i * record_size;
        Gaussian g;
        g.center = Vec3(read_property(record, *req[0]), read_property(record, *req[1]),
                        read_property(record, *req[2]));
        g.color_dc = Vec3(read_property(record, *req[3]), read_property(record, *req[4]),
                          read_property(record, *req[5]));
        g.opacity = logistic(read_property(record, *req[6]));
        g.scale = Vec3(std::exp(read_property(record, *req[7])),
                       std::exp(read_property(record, *req[8])),
                       std::exp(read_property(record, *req[9])));
        Quat q(read_property(record, *req[10]), read_property(record, *req[11]),
               read_property(record, *req[12]), read_property(record, *req[13]));
        const double n = q.norm();
        g.rotation = (n > 1e-12) ? Quat(q.coeffs() / n) : Quat::Identity();
        cloud.gaussians.push_back(std::move(g));
    }
    return cloud;
}

std::vector<std::uint8_t> write_gsplat_ply(const GaussianCloud& cloud) {
    std::string header;
    header += "ply\n";
    header += "format binary_little_endian 1.0\n";
    header += "element vertex " + std::to_string(cloud.size()) + "\n";
    for (const char* name : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2", "opacity",
                             "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2",
                             "rot_3"}) {
        header += "property float ";
        header += name;
        header += "\n";
    }
    header += "end_header\n";

    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + cloud.size() * 14 * 4);
    for (const Gaussian& g : cloud.gaussians) {
        append_f32(out, g.center.x());
        append_f32(out, g.center.y());
        append_f32(out, g.center.z());
        append_f32(out, g.color_dc.x());
        append_f32(out, g.color_dc.y());
        append_f32(out, g.color_dc.z());
        append_f32(out, logit(g.opacity));
        append_f32(out, std::log(g.scale.x()));
        append_f32(out, std::log(g.scale.y()));
        append_f32(out, std::log(g.scale.z()));
        append_f32(out, g.rotation.w());
        append_f32(out, g.rotation.x());
        append_f32(out, g.rotation.y());
        append_f32(out, g.rotation.z());
    }
    return out;
}

GaussianCloud load_gsplat_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open PLY file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return parse_gsplat_ply(bytes);
}

void save_gsplat_ply(const GaussianCloud& cloud, const std::filesystem::path& path) {
    const auto bytes = write_gsplat_ply(cloud);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

GaussianCloud subcloud(const GaussianCloud& cloud, std::span<const std::uint32_t> indices) {
    GaussianCloud out;
    out.gaussians.reserve(indices.size());
    for (const std::uint32_t idx : indices) {
        if (idx >= cloud.size())
            throw DimensionMismatch("subcloud index " + std::to_string(idx) +
                                    " out of range for cloud of size " +
                                    std::to_string(cloud.size()));
        out.gaussians.push_back(cloud[idx]);
    }
    return out;
}

}  // namespace avs3d

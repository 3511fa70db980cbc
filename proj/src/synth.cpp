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

#include "avs3d/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "avs3d/error.hpp"
#include "avs3d/pipeline.hpp"
#include "avs3d/wav.hpp"

namespace avs3d {

namespace {

using nlohmann::json;

// Substream tags: keep frame-level draws independent of scene generation.
constexpr std::uint64_t kStreamPredMask = 1000;
constexpr std::uint64_t kStreamAudioNoise = 2000;

Vec3 vec3_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3)
        throw InvalidSpec(std::string(what) + " must be a 3-element array");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Truncated normal: mean at the box center, sigma = the half-extent (flat
// enough that box corners stay dense), resampled until inside the box.
double sample_truncated(SeededRng& rng, double center, double half_extent) {
    for (;;) {
        const double v = rng.normal(center, half_extent);
        if (std::abs(v - center) <= half_extent) return v;
    }
}

void paint_disk(MaskImage& mask, double cx, double cy, double radius) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int x1 = std::min(mask.width - 1, static_cast<int>(std::ceil(cx + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int y1 = std::min(mask.height - 1, static_cast<int>(std::ceil(cy + radius)));
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double dx = (x + 0.5) - cx;
            const double dy = (y + 0.5) - cy;
            if (dx * dx + dy * dy <= r2) mask.set(x, y, 1);
        }
}

MaskImage dilate(const MaskImage& mask, int radius) {
    MaskImage out = MaskImage::zeros(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            const int x0 = std::max(0, x - radius);
            const int x1 = std::min(mask.width - 1, x + radius);
            const int y0 = std::max(0, y - radius);
            const int y1 = std::min(mask.height - 1, y + radius);
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx) out.set(xx, yy, 1);
        }
    return out;
}

void validate_scene_spec(const SceneSpec& spec) {
    if (spec.objects.empty()) throw InvalidSpec("scene needs at least one object");
    int emitting = 0;
    for (const ObjectSpec& obj : spec.objects) {
        if (obj.emitting) ++emitting;
        if (obj.gaussian_count <= 0)
            throw InvalidSpec("object gaussian_count must be positive");
        if (obj.extent.minCoeff() <= 0.0)
            throw InvalidSpec("object extents must be positive");
    }
    if (emitting != 1)
        throw InvalidSpec("exactly one object must be emitting, got " +
                          std::to_string(emitting));
    if (spec.clutter_count < 0) throw InvalidSpec("clutter_count must be non-negative");
    if ((spec.room_box.extent().array() <= 0.0).any())
        throw InvalidSpec("room_box must have positive extent");
    if (spec.gaussian_scale <= 0.0) throw InvalidSpec("gaussian_scale must be positive");
    if (spec.gaussian_opacity <= 0.0 || spec.gaussian_opacity > 1.0)
        throw InvalidSpec("gaussian_opacity must be in (0, 1]");
}

}  // namespace

std::vector<std::uint32_t> SyntheticScene::object_indices(int object_id) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < labels.size(); ++i)
        if (labels[i] == object_id) out.push_back(i);
    return out;
}

SyntheticScene generate_scene(const SceneSpec& spec) {
    validate_scene_spec(spec);
    SeededRng rng(spec.seed);

    SyntheticScene scene;
    std::size_t total = static_cast<std::size_t>(spec.clutter_count);
    for (const ObjectSpec& obj : spec.objects)
        total += static_cast<std::size_t>(obj.gaussian_count);
    scene.cloud.gaussians.reserve(total);
    scene.labels.reserve(total);

    for (std::size_t id = 0; id < spec.objects.size(); ++id) {
        const ObjectSpec& obj = spec.objects[id];
        const Vec3 color = obj.emitting ? Vec3(1.0, 0.25, 0.25) : Vec3(0.25, 0.25, 1.0);
        for (int k = 0; k < obj.gaussian_count; ++k) {
            Gaussian g;
            g.center = Vec3(sample_truncated(rng, obj.center.x(), obj.extent.x()),
                            sample_truncated(rng, obj.center.y(), obj.extent.y()),
                            sample_truncated(rng, obj.center.z(), obj.extent.z()));
            g.scale = Vec3::Constant(spec.gaussian_scale);
            g.opacity = spec.gaussian_opacity;
            g.color_dc = color;
            scene.cloud.gaussians.push_back(std::move(g));
            scene.labels.push_back(static_cast<int>(id));
        }
    }

    for (int k = 0; k < spec.clutter_count; ++k) {
        Gaussian g;
        g.center = Vec3(rng.uniform(spec.room_box.min.x(), spec.room_box.max.x()),
                        rng.uniform(spec.room_box.min.y(), spec.room_box.max.y()),
                        rng.uniform(spec.room_box.min.z(), spec.room_box.max.z()));
        g.scale = Vec3::Constant(spec.gaussian_scale);
        g.opacity = spec.gaussian_opacity;
        g.color_dc = Vec3(0.5, 0.5, 0.5);
        scene.cloud.gaussians.push_back(std::move(g));
        scene.labels.push_back(-1);
    }
    return scene;
}

std::vector<CameraPose> generate_trajectory(const TrajectorySpec& traj,
                                            const CameraIntrinsics& camera) {
    if (traj.frame_count < 8)
        throw InvalidSpec("trajectory needs at least 8 frames for the 7:1 split");
    if (traj.waypoints.empty()) throw InvalidSpec("trajectory needs waypoints");

    // Arc-length table over the waypoint polyline.
    std::vector<double> cumulative{0.0};
    for (std::size_t i = 1; i < traj.waypoints.size(); ++i)
        cumulative.push_back(cumulative.back() +
                             (traj.waypoints[i] - traj.waypoints[i - 1]).norm());
    const double total = cumulative.back();

    const Vec3 up(0.0, 1.0, 0.0);
    auto position_at = [&](double s) -> Vec3 {
        if (total <= 0.0 || traj.waypoints.size() == 1) return traj.waypoints.front();
        std::size_t seg = 1;
        while (seg + 1 < cumulative.size() && cumulative[seg] < s) ++seg;
        const double seg_len = cumulative[seg] - cumulative[seg - 1];
        const double t = seg_len > 0.0 ? (s - cumulative[seg - 1]) / seg_len : 0.0;
        return traj.waypoints[seg - 1] +
               t * (traj.waypoints[seg] - traj.waypoints[seg - 1]);
    };
    auto tangent_at = [&](double s) -> Vec3 {
        if (total <= 0.0 || traj.waypoints.size() == 1) return Vec3(0.0, 0.0, 1.0);
        std::size_t seg = 1;
        while (seg + 1 < cumulative.size() && cumulative[seg] < s) ++seg;
        const Vec3 d = traj.waypoints[seg] - traj.waypoints[seg - 1];
        return d.norm() > 0.0 ? d.normalized() : Vec3(0.0, 0.0, 1.0);
    };

    std::vector<CameraPose> poses;
    poses.reserve(static_cast<std::size_t>(traj.frame_count));
    for (int i = 0; i < traj.frame_count; ++i) {
        const double fraction =
            traj.frame_count > 1 ? static_cast<double>(i) / (traj.frame_count - 1) : 0.0;
        const double s = fraction * total;
        const Vec3 pos = position_at(s);
        const Vec3 target = traj.look_at ? *traj.look_at : pos + tangent_at(s);
        poses.push_back(look_at_pose(pos, target, up, camera.fx, camera.fy, camera.cx,
                                     camera.cy, camera.width, camera.height));
    }
    return poses;
}

std::pair<double, double> binaural_rms_pair(double lateral_sine, double distance,
                                            const BinauralModel& model) {
    const double base = model.amplitude / (1.0 + distance);
    const double right = base * (1.0 + model.lateral_gain * lateral_sine) * 0.5;
    const double left = base * (1.0 - model.lateral_gain * lateral_sine) * 0.5;
    return {left, right};
}

RmsObservation synthesize_binaural_rms(const CameraPose& pose, const Vec3& emitter,
                                       const BinauralModel& model, SeededRng* noise_rng) {
    const Vec3 offset = emitter - pose.position;
    const double distance = offset.norm();
    const double lateral_sine =
        distance > 1e-12 ? (offset / distance).dot(pose.right_axis()) : 0.0;
    auto [left, right] = binaural_rms_pair(lateral_sine, distance, model);
    if (model.noise_std > 0.0 && noise_rng != nullptr) {
        left = std::max(0.0, left + noise_rng->normal(0.0, model.noise_std));
        right = std::max(0.0, right + noise_rng->normal(0.0, model.noise_std));
    }
    RmsObservation obs;
    obs.rms_left = left;
    obs.rms_right = right;
    obs.pose = pose;
    return obs;
}

MaskImage render_gt_mask(const GaussianCloud& cloud,
                         const std::vector<std::uint32_t>& object_indices,
                         const CameraPose& pose, const RenderConfig& cfg) {
    if (object_indices.empty())
        throw EmptySegmentation("ground-truth mask needs a non-empty object index set");
    Segmentation seg;
    seg.selected = object_indices;
    return render_mask(cloud, seg, pose, cfg);
}

DatasetSpec parse_dataset_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scene spec is not valid JSON: ") + e.what());
    }

    DatasetSpec spec;
    try {
        spec.scene.seed = doc.value("seed", 0ull);
        if (doc.contains("room_box")) {
            spec.scene.room_box.min = vec3_from_json(doc["room_box"]["min"], "room_box.min");
            spec.scene.room_box.max = vec3_from_json(doc["room_box"]["max"], "room_box.max");
        }
        if (!doc.contains("objects") || !doc["objects"].is_array())
            throw InvalidSpec("scene spec needs an 'objects' array");
        for (const json& j : doc["objects"]) {
            ObjectSpec obj;
            obj.center = vec3_from_json(j.at("center"), "object center");
            obj.extent = vec3_from_json(j.at("extent"), "object extent");
            obj.gaussian_count = j.at("gaussian_count").get<int>();
            obj.emitting = j.value("emitting", false);
            spec.scene.objects.push_back(obj);
        }
        spec.scene.clutter_count = doc.value("clutter_count", 0);
        spec.scene.gaussian_scale = doc.value("gaussian_scale", spec.scene.gaussian_scale);
        spec.scene.gaussian_opacity =
            doc.value("gaussian_opacity", spec.scene.gaussian_opacity);

        if (doc.contains("trajectory")) {
            const json& t = doc["trajectory"];
            spec.trajectory.frame_count = t.value("frame_count", spec.trajectory.frame_count);
            if (t.contains("waypoints"))
                for (const json& w : t["waypoints"])
                    spec.trajectory.waypoints.push_back(vec3_from_json(w, "waypoint"));
            if (t.contains("look_at") && !t["look_at"].is_string())
                spec.trajectory.look_at = vec3_from_json(t["look_at"], "look_at");
            // "look_at": "path-forward" (or absent) keeps the path-forward default
        }

        if (doc.contains("camera")) {
            const json& c = doc["camera"];
            spec.camera.fx = c.value("fx", spec.camera.fx);
            spec.camera.fy = c.value("fy", spec.camera.fy);
            spec.camera.cx = c.value("cx", spec.camera.cx);
            spec.camera.cy = c.value("cy", spec.camera.cy);
            spec.camera.width = c.value("width", spec.camera.width);
            spec.camera.height = c.value("height", spec.camera.height);
        }
        if (doc.contains("binaural")) {
            const json& b = doc["binaural"];
            spec.binaural.amplitude = b.value("amplitude", spec.binaural.amplitude);
            spec.binaural.lateral_gain = b.value("lateral_gain", spec.binaural.lateral_gain);
            spec.binaural.noise_std = b.value("noise_std", spec.binaural.noise_std);
        }
        if (doc.contains("corruption")) {
            const json& c = doc["corruption"];
            spec.corruption.paint_silent = c.value("paint_silent", spec.corruption.paint_silent);
            spec.corruption.miss_probability =
                c.value("miss_probability", spec.corruption.miss_probability);
            spec.corruption.dilate_px = c.value("dilate_px", spec.corruption.dilate_px);
            spec.corruption.blob_count = c.value("blob_count", spec.corruption.blob_count);
            spec.corruption.blob_radius_px =
                c.value("blob_radius_px", spec.corruption.blob_radius_px);
        }
        if (doc.contains("render")) {
            const json& r = doc["render"];
            spec.render.alpha_threshold = r.value("alpha_threshold", spec.render.alpha_threshold);
            spec.render.sigma_cutoff = r.value("sigma_cutoff", spec.render.sigma_cutoff);
        }
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("malformed scene spec: ") + e.what());
    }
    return spec;
}

DatasetSpec load_dataset_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene spec: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return parse_dataset_spec(text);
}

Dataset build_dataset(const DatasetSpec& spec) {
    Dataset ds;
    ds.scene = generate_scene(spec.scene);
    ds.poses = generate_trajectory(spec.trajectory, spec.camera);

    for (std::size_t id = 0; id < spec.scene.objects.size(); ++id) {
        const auto indices = ds.scene.object_indices(static_cast<int>(id));
        if (spec.scene.objects[id].emitting) {
            ds.emitter_id = static_cast<int>(id);
            ds.emitter = spec.scene.objects[id].center;
            ds.emitter_indices = indices;
        } else {
            ds.silent_indices.insert(ds.silent_indices.end(), indices.begin(), indices.end());
        }
    }
    std::sort(ds.silent_indices.begin(), ds.silent_indices.end());

    Segmentation silent_seg;
    silent_seg.selected = ds.silent_indices;

    const std::uint64_t seed = spec.scene.seed;
    ds.gt_masks.reserve(ds.poses.size());
    ds.pred_masks.reserve(ds.poses.size());
    ds.observations.reserve(ds.poses.size());

    for (std::size_t frame = 0; frame < ds.poses.size(); ++frame) {
        const CameraPose& pose = ds.poses[frame];
        MaskImage gt = render_gt_mask(ds.scene.cloud, ds.emitter_indices, pose, spec.render);

        SeededRng mask_rng(seed, kStreamPredMask + frame);
        MaskImage pred;
        const bool miss = mask_rng.uniform() < spec.corruption.miss_probability;
        if (miss) {
            pred = MaskImage::zeros(pose.width, pose.height);
        } else {
            pred = gt;
            if (spec.corruption.paint_silent && !silent_seg.empty()) {
                const MaskImage silent =
                    render_mask(ds.scene.cloud, silent_seg, pose, spec.render);
                for (std::size_t i = 0; i < pred.data.size(); ++i)
                    pred.data[i] |= silent.data[i];
            }
            if (spec.corruption.dilate_px > 0) pred = dilate(pred, spec.corruption.dilate_px);
            for (int b = 0; b < spec.corruption.blob_count; ++b) {
                const double bx = mask_rng.uniform(0.0, pose.width);
                const double by = mask_rng.uniform(0.0, pose.height);
                paint_disk(pred, bx, by, spec.corruption.blob_radius_px);
            }
        }

        SeededRng audio_rng(seed, kStreamAudioNoise + frame);
        ds.observations.push_back(
            synthesize_binaural_rms(pose, ds.emitter, spec.binaural, &audio_rng));
        ds.gt_masks.push_back(std::move(gt));
        ds.pred_masks.push_back(std::move(pred));
    }
    return ds;
}

std::filesystem::path export_dataset(const DatasetSpec& spec,
                                     const std::filesystem::path& out_dir) {
    const Dataset ds = build_dataset(spec);

    std::error_code ec;
    for (const char* sub : {"", "gt_masks", "pred_masks", "audio"}) {
        std::filesystem::create_directories(out_dir / sub, ec);
        if (ec) throw IoError("cannot create output directory: " + (out_dir / sub).string());
    }

    save_gsplat_ply(ds.scene.cloud, out_dir / "scene.ply");

    FrameSet frames;
    for (std::size_t i = 0; i < ds.poses.size(); ++i) {
        frames.frame_ids.push_back(static_cast<int>(i));
        frames.poses.push_back(ds.poses[i]);
    }
    save_poses_json(frames, out_dir / "poses.json");

    json manifest;
    manifest["format"] = "avs3d-dataset/1";
    manifest["seed"] = spec.scene.seed;
    manifest["frame_count"] = spec.trajectory.frame_count;
    manifest["scene_ply"] = "scene.ply";
    manifest["poses"] = "poses.json";
    manifest["camera"] = {{"fx", spec.camera.fx},     {"fy", spec.camera.fy},
                          {"cx", spec.camera.cx},     {"cy", spec.camera.cy},
                          {"width", spec.camera.width}, {"height", spec.camera.height}};
    manifest["binaural"] = {{"amplitude", spec.binaural.amplitude},
                            {"lateral_gain", spec.binaural.lateral_gain},
                            {"noise_std", spec.binaural.noise_std}};
    manifest["corruption"] = {{"paint_silent", spec.corruption.paint_silent},
                              {"miss_probability", spec.corruption.miss_probability},
                              {"dilate_px", spec.corruption.dilate_px},
                              {"blob_count", spec.corruption.blob_count},
                              {"blob_radius_px", spec.corruption.blob_radius_px}};

    json objects = json::array();
    std::size_t index_start = 0;
    for (std::size_t id = 0; id < spec.scene.objects.size(); ++id) {
        const ObjectSpec& obj = spec.scene.objects[id];
        objects.push_back({{"id", id},
                           {"center", vec3_to_json(obj.center)},
                           {"extent", vec3_to_json(obj.extent)},
                           {"gaussian_count", obj.gaussian_count},
                           {"emitting", obj.emitting},
                           {"index_start", index_start}});
        index_start += static_cast<std::size_t>(obj.gaussian_count);
    }
    manifest["objects"] = objects;
    manifest["clutter"] = {{"count", spec.scene.clutter_count}, {"index_start", index_start}};

    json frame_list = json::array();
    for (std::size_t i = 0; i < ds.poses.size(); ++i) {
        const int frame = static_cast<int>(i);
        const std::string gt_rel = "gt_masks/" + mask_filename(frame);
        const std::string pred_rel = "pred_masks/" + mask_filename(frame);
        const std::string audio_rel = "audio/" + audio_filename(frame);

        save_pgm(ds.gt_masks[i], out_dir / gt_rel);
        save_pgm(ds.pred_masks[i], out_dir / pred_rel);

        // Constant-amplitude samples make the channel RMS equal the model's
        // pair exactly (up to float32 storage).
        StereoClip clip;
        clip.sample_rate = 44100;
        clip.left.assign(44100, ds.observations[i].rms_left);
        clip.right.assign(44100, ds.observations[i].rms_right);
        save_wav(clip, out_dir / audio_rel);

        frame_list.push_back({{"frame", frame},
                              {"gt_mask", gt_rel},
                              {"pred_mask", pred_rel},
                              {"audio", audio_rel}});
    }
    manifest["frames"] = frame_list;

    const std::filesystem::path manifest_path = out_dir / "manifest.json";
    std::ofstream out(manifest_path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + manifest_path.string());
    out << manifest.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + manifest_path.string());
    return manifest_path;
}

}  // namespace avs3d

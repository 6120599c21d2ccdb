#include "skyflux/synth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "skyflux/core/error.hpp"
#include "skyflux/georeg/warp.hpp"

namespace skyflux::synth {

namespace {

struct Wave {
    double kx, ky, phase;
    std::array<double, 3> gain;
};

std::vector<Wave> make_waves(const TextureSpec& tex, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> gain(0.7, 1.3);
    std::vector<Wave> waves;
    const double lo = std::log(tex.min_wavelength_m);
    const double hi = std::log(tex.max_wavelength_m);
    for (int k = 0; k < tex.waves; ++k) {
        double lambda = std::exp(lo + (hi - lo) * unit(rng));
        double a = angle(rng);
        Wave w;
        w.kx = 2.0 * M_PI / lambda * std::cos(a);
        w.ky = 2.0 * M_PI / lambda * std::sin(a);
        w.phase = angle(rng);
        for (double& g : w.gain)
            g = gain(rng);
        waves.push_back(w);
    }
    return waves;
}

Color texture_at(const TextureSpec& tex, const std::vector<Wave>& waves, double x,
                 double y) {
    Color c{tex.base, tex.base, tex.base};
    if (!waves.empty()) {
        double norm = tex.amplitude / std::sqrt(static_cast<double>(waves.size()));
        for (const Wave& w : waves) {
            double s = std::sin(w.kx * x + w.ky * y + w.phase);
            for (int ch = 0; ch < 3; ++ch)
                c[ch] += norm * w.gain[ch] * s;
        }
    }
    for (double& v : c)
        v = std::clamp(v, 0.0, 1.0);
    return c;
}

// Horizontal rectangle prepared for raycasting. Heights above ground are
// negative z in the aerial world frame.
struct RenderRect {
    double x0, y0, x1, y1;
    double z;
    Color color;
};

double rect_height(const RectObject& r) { return r.height_m; }

} // namespace

void SceneSpec::validate() const {
    if (frame_count < 1)
        throw InvalidSpec("scene: frame_count must be at least 1");
    if (!(frame_rate_hz > 0))
        throw InvalidSpec("scene: frame_rate_hz must be positive");
    if (image.width <= 0 || image.height <= 0 || !(image.f > 0))
        throw InvalidSpec("scene: image dims and focal length must be positive");
    if (!(orbit.radius_m >= 0) || !(orbit.altitude_m > 0))
        throw InvalidSpec("scene: orbit radius must be >= 0 and altitude > 0");
    plane.validate();
    if (texture.waves < 0 || !(texture.amplitude >= 0) ||
        !(texture.min_wavelength_m > 0) ||
        !(texture.max_wavelength_m >= texture.min_wavelength_m))
        throw InvalidSpec("scene: bad texture parameters");
    auto check_rect = [&](double w, double h, double height, const char* kind) {
        if (!(w > 0) || !(h > 0))
            throw InvalidSpec(std::string("scene: ") + kind + " size must be positive");
        if (!(height >= 0) || !(height < orbit.altitude_m))
            throw InvalidSpec(std::string("scene: ") + kind +
                              " height must be in [0, altitude)");
    };
    for (const RectObject& o : vehicles)
        check_rect(o.w, o.h, o.height_m, "vehicle");
    for (const RectObject& o : parked)
        check_rect(o.w, o.h, o.height_m, "parked vehicle");
    for (const BuildingSpec& b : buildings)
        check_rect(b.w, b.h, b.height_m, "building");
}

SceneSpec default_scene_spec() {
    SceneSpec s;
    s.plane.output_width = 256;
    s.plane.output_height = 256;
    s.plane.plane_scale = 0.25;
    s.plane.plane_origin = {0.0, 0.0};
    return s;
}

georeg::CameraPose orbit_pose(const SceneSpec& spec, int frame_index) {
    const OrbitSpec& o = spec.orbit;
    double theta = o.start_angle_rad + o.angular_rate_rad * frame_index;
    Eigen::Vector3d C(o.center_x + o.radius_m * std::cos(theta),
                      o.center_y + o.radius_m * std::sin(theta), -o.altitude_m);
    Eigen::Vector3d target(o.center_x, o.center_y, 0.0);

    Eigen::Vector3d zc = (target - C).normalized();
    Eigen::Vector3d down(0, 0, 1); // world +z points down in the aerial frame
    Eigen::Vector3d yp = down - down.dot(zc) * zc;
    Eigen::Vector3d yc = yp.norm() < 1e-9 ? Eigen::Vector3d(0, 1, 0) : yp.normalized();
    Eigen::Vector3d xc = yc.cross(zc);

    georeg::CameraPose pose;
    pose.frame_index = frame_index;
    pose.f = spec.image.f;
    pose.u = spec.image.u;
    pose.v = spec.image.v;
    pose.R.row(0) = xc.transpose();
    pose.R.row(1) = yc.transpose();
    pose.R.row(2) = zc.transpose();
    pose.t = -pose.R * C;
    pose.validate();
    return pose;
}

BBox apparent_box(const SceneSpec& spec, const georeg::CameraPose& pose, double x,
                  double y, double w, double h, double height_m) {
    Homography c2p = georeg::camera_to_plane_pixel(pose, spec.plane);
    double z = -height_m;
    const Eigen::Vector3d corners[4] = {
        {x, y, z}, {x + w, y, z}, {x, y + h, z}, {x + w, y + h, z}};
    double minx = 0, miny = 0, maxx = 0, maxy = 0;
    for (int i = 0; i < 4; ++i) {
        Eigen::Vector3d img = pose.project(corners[i]);
        Eigen::Vector2d pp = c2p.apply({img.x() / img.z(), img.y() / img.z()});
        if (i == 0) {
            minx = maxx = pp.x();
            miny = maxy = pp.y();
        } else {
            minx = std::min(minx, pp.x());
            maxx = std::max(maxx, pp.x());
            miny = std::min(miny, pp.y());
            maxy = std::max(maxy, pp.y());
        }
    }
    BBox b;
    b.x = minx;
    b.y = miny;
    b.w = maxx - minx;
    b.h = maxy - miny;
    b.category = Category::GroundTruth;
    b.confidence = 1.0;
    b.frame_index = pose.frame_index;
    return b;
}

RenderResult render_sequence(const SceneSpec& spec) {
    spec.validate();
    std::vector<Wave> waves = make_waves(spec.texture, spec.seed);

    RenderResult out;
    out.frames.reserve(spec.frame_count);
    out.poses.reserve(spec.frame_count);

    for (const BuildingSpec& b : spec.buildings) {
        BBox fp;
        fp.x = (b.x - spec.plane.plane_origin.x()) / spec.plane.plane_scale;
        fp.y = (b.y - spec.plane.plane_origin.y()) / spec.plane.plane_scale;
        fp.w = b.w / spec.plane.plane_scale;
        fp.h = b.h / spec.plane.plane_scale;
        fp.category = Category::Building;
        fp.frame_index = 0;
        out.building_footprints.push_back(fp);
    }

    for (int i = 0; i < spec.frame_count; ++i) {
        georeg::CameraPose pose = orbit_pose(spec, i);
        double t_sec = i / spec.frame_rate_hz;

        std::vector<RenderRect> rects;
        for (const BuildingSpec& b : spec.buildings)
            rects.push_back({b.x, b.y, b.x + b.w, b.y + b.h, -b.height_m, b.roof_color});
        for (const RectObject& o : spec.vehicles) {
            double px = o.x + o.vx * t_sec, py = o.y + o.vy * t_sec;
            rects.push_back({px, py, px + o.w, py + o.h, -rect_height(o), o.color});
        }
        for (const RectObject& o : spec.parked)
            rects.push_back({o.x, o.y, o.x + o.w, o.y + o.h, -rect_height(o), o.color});
        // Nearer planes (more negative z) occlude; stable order breaks ties.
        std::stable_sort(rects.begin(), rects.end(),
                         [](const RenderRect& a, const RenderRect& b) { return a.z < b.z; });

        Eigen::Vector3d C = pose.camera_center();
        Eigen::Vector3d r1 = pose.R.row(0), r2 = pose.R.row(1), r3 = pose.R.row(2);

        auto sample_ray = [&](double a, double b) -> Color {
            Eigen::Vector3d d = a * r1 + b * r2 + r3; // R^T (a, b, 1)
            if (d.z() <= 1e-12)
                return {spec.texture.base, spec.texture.base, spec.texture.base};
            for (const RenderRect& r : rects) {
                double s = (r.z - C.z()) / d.z();
                double qx = C.x() + s * d.x();
                double qy = C.y() + s * d.y();
                if (qx >= r.x0 && qx < r.x1 && qy >= r.y0 && qy < r.y1)
                    return r.color;
            }
            double s = -C.z() / d.z();
            return texture_at(spec.texture, waves, C.x() + s * d.x(), C.y() + s * d.y());
        };

        // Supersampled rays per pixel: hard object edges become subpixel
        // coverage ramps instead of flipping whole pixels as the camera
        // grid slides over the scene.
        constexpr int kSub = 4;
        Frame frame(spec.image.width, spec.image.height, 3, i);
        frame.timestamp = t_sec;
        for (int py = 0; py < spec.image.height; ++py)
            for (int px = 0; px < spec.image.width; ++px) {
                Color acc{0.0, 0.0, 0.0};
                for (int sy = 0; sy < kSub; ++sy)
                    for (int sx = 0; sx < kSub; ++sx) {
                        double a = (px + (sx + 0.5) / kSub - 0.5 - spec.image.u) /
                                   spec.image.f;
                        double b = (py + (sy + 0.5) / kSub - 0.5 - spec.image.v) /
                                   spec.image.f;
                        Color c = sample_ray(a, b);
                        for (int ch = 0; ch < 3; ++ch)
                            acc[ch] += c[ch];
                    }
                for (int ch = 0; ch < 3; ++ch)
                    frame.at(px, py, ch) = acc[ch] / (kSub * kSub);
            }

        for (const RectObject& o : spec.vehicles) {
            double ox = o.x + o.vx * t_sec, oy = o.y + o.vy * t_sec;
            BBox b = apparent_box(spec, pose, ox, oy, o.w, o.h, o.height_m);
            appearance::DetectionRecord rec{i, b.x, b.y, b.w, b.h, "GT", 1.0};
            out.gt_moving.push_back(rec);
            rec.class_label = "car";
            out.gt_vehicles.push_back(rec);
        }
        for (const RectObject& o : spec.parked) {
            BBox b = apparent_box(spec, pose, o.x, o.y, o.w, o.h, o.height_m);
            out.gt_vehicles.push_back({i, b.x, b.y, b.w, b.h, "car", 1.0});
        }

        out.poses.push_back(pose);
        out.frames.push_back(std::move(frame));
    }
    return out;
}

std::vector<appearance::DetectionRecord>
oracle_appearance(const std::vector<appearance::DetectionRecord>& gt,
                  const OracleConfig& cfg, int plane_width, int plane_height) {
    if (cfg.dropout < 0 || cfg.dropout > 1 || cfg.false_positive_rate < 0 ||
        cfg.false_positive_rate > 1 || cfg.jitter_px < 0)
        throw InvalidSpec("oracle_appearance: rates must be in [0, 1]");
    std::mt19937 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);

    std::vector<appearance::DetectionRecord> out;
    for (const appearance::DetectionRecord& g : gt) {
        bool keep = unit(rng) >= cfg.dropout;
        // Fixed draw count per record keeps the stream, and so every later
        // box, independent of earlier outcomes.
        double jx = sym(rng), jy = sym(rng), jw = sym(rng), jh = sym(rng);
        bool inject = unit(rng) < cfg.false_positive_rate;
        double fx = unit(rng), fy = unit(rng), fw = unit(rng), fh = unit(rng);

        if (keep) {
            appearance::DetectionRecord r = g;
            r.class_label = "car";
            r.x += jx * cfg.jitter_px;
            r.y += jy * cfg.jitter_px;
            r.w = std::max(0.5, r.w + jw * cfg.jitter_px);
            r.h = std::max(0.5, r.h + jh * cfg.jitter_px);
            out.push_back(r);
        }
        if (inject) {
            appearance::DetectionRecord r;
            r.frame_index = g.frame_index;
            r.class_label = "car";
            r.confidence = 1.0;
            r.w = 8.0 + 16.0 * fw;
            r.h = 6.0 + 10.0 * fh;
            r.x = fx * std::max(1.0, plane_width - r.w);
            r.y = fy * std::max(1.0, plane_height - r.h);
            out.push_back(r);
        }
    }
    return out;
}

} // namespace skyflux::synth

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "skyflux/core/error.hpp"
#include "skyflux/synth/scene.hpp"

namespace skyflux::synth {

namespace {

using nlohmann::ordered_json;

void check_keys(const ordered_json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    if (!j.is_object())
        throw InvalidSpec("scene spec: " + where + " must be an object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw InvalidSpec("scene spec: unknown key \"" + item.key() + "\" in " +
                              where);
}

double num(const ordered_json& j, const std::string& where) {
    if (!j.is_number())
        throw InvalidSpec("scene spec: " + where + " must be a number");
    return j.get<double>();
}

void read_pair(const ordered_json& j, double& a, double& b, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw InvalidSpec("scene spec: " + where + " must be [x, y]");
    a = num(j[0], where);
    b = num(j[1], where);
}

Color read_color(const ordered_json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw InvalidSpec("scene spec: " + where + " must be [r, g, b]");
    return {num(j[0], where), num(j[1], where), num(j[2], where)};
}

} // namespace

SceneSpec scene_spec_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scene spec: ") + e.what());
    }
    check_keys(j,
               {"seed", "frame_count", "frame_rate_hz", "image", "orbit", "plane",
                "texture", "vehicles", "parked", "buildings"},
               "scene");

    SceneSpec s = default_scene_spec();
    if (j.contains("seed"))
        s.seed = j["seed"].get<uint32_t>();
    if (j.contains("frame_count"))
        s.frame_count = j["frame_count"].get<int>();
    if (j.contains("frame_rate_hz"))
        s.frame_rate_hz = num(j["frame_rate_hz"], "frame_rate_hz");

    if (j.contains("image")) {
        const auto& ji = j["image"];
        check_keys(ji, {"width", "height", "f", "u", "v"}, "image");
        if (ji.contains("width"))
            s.image.width = ji["width"].get<int>();
        if (ji.contains("height"))
            s.image.height = ji["height"].get<int>();
        if (ji.contains("f"))
            s.image.f = num(ji["f"], "image.f");
        if (ji.contains("u"))
            s.image.u = num(ji["u"], "image.u");
        if (ji.contains("v"))
            s.image.v = num(ji["v"], "image.v");
    }
    if (j.contains("orbit")) {
        const auto& jo = j["orbit"];
        check_keys(jo,
                   {"radius_m", "altitude_m", "angular_rate_rad", "start_angle_rad",
                    "center"},
                   "orbit");
        if (jo.contains("radius_m"))
            s.orbit.radius_m = num(jo["radius_m"], "orbit.radius_m");
        if (jo.contains("altitude_m"))
            s.orbit.altitude_m = num(jo["altitude_m"], "orbit.altitude_m");
        if (jo.contains("angular_rate_rad"))
            s.orbit.angular_rate_rad = num(jo["angular_rate_rad"], "orbit.angular_rate_rad");
        if (jo.contains("start_angle_rad"))
            s.orbit.start_angle_rad = num(jo["start_angle_rad"], "orbit.start_angle_rad");
        if (jo.contains("center"))
            read_pair(jo["center"], s.orbit.center_x, s.orbit.center_y, "orbit.center");
    }
    if (j.contains("plane")) {
        const auto& jp = j["plane"];
        check_keys(jp, {"width", "height", "scale_m_per_px", "origin"}, "plane");
        if (jp.contains("width"))
            s.plane.output_width = jp["width"].get<int>();
        if (jp.contains("height"))
            s.plane.output_height = jp["height"].get<int>();
        if (jp.contains("scale_m_per_px"))
            s.plane.plane_scale = num(jp["scale_m_per_px"], "plane.scale_m_per_px");
        if (jp.contains("origin")) {
            double ox, oy;
            read_pair(jp["origin"], ox, oy, "plane.origin");
            s.plane.plane_origin = {ox, oy};
        }
    }
    if (j.contains("texture")) {
        const auto& jt = j["texture"];
        check_keys(jt, {"base", "amplitude", "waves", "min_wavelength_m", "max_wavelength_m"},
                   "texture");
        if (jt.contains("base"))
            s.texture.base = num(jt["base"], "texture.base");
        if (jt.contains("amplitude"))
            s.texture.amplitude = num(jt["amplitude"], "texture.amplitude");
        if (jt.contains("waves"))
            s.texture.waves = jt["waves"].get<int>();
        if (jt.contains("min_wavelength_m"))
            s.texture.min_wavelength_m = num(jt["min_wavelength_m"], "texture.min_wavelength_m");
        if (jt.contains("max_wavelength_m"))
            s.texture.max_wavelength_m = num(jt["max_wavelength_m"], "texture.max_wavelength_m");
    }
    if (j.contains("vehicles")) {
        for (const auto& jv : j["vehicles"]) {
            check_keys(jv, {"start", "velocity", "size", "color", "height_m"}, "vehicle");
            RectObject o;
            if (jv.contains("start"))
                read_pair(jv["start"], o.x, o.y, "vehicle.start");
            if (jv.contains("velocity"))
                read_pair(jv["velocity"], o.vx, o.vy, "vehicle.velocity");
            if (jv.contains("size"))
                read_pair(jv["size"], o.w, o.h, "vehicle.size");
            if (jv.contains("color"))
                o.color = read_color(jv["color"], "vehicle.color");
            if (jv.contains("height_m"))
                o.height_m = num(jv["height_m"], "vehicle.height_m");
            s.vehicles.push_back(o);
        }
    }
    if (j.contains("parked")) {
        for (const auto& jv : j["parked"]) {
            check_keys(jv, {"position", "size", "color", "height_m"}, "parked");
            RectObject o;
            if (jv.contains("position"))
                read_pair(jv["position"], o.x, o.y, "parked.position");
            if (jv.contains("size"))
                read_pair(jv["size"], o.w, o.h, "parked.size");
            if (jv.contains("color"))
                o.color = read_color(jv["color"], "parked.color");
            if (jv.contains("height_m"))
                o.height_m = num(jv["height_m"], "parked.height_m");
            s.parked.push_back(o);
        }
    }
    if (j.contains("buildings")) {
        for (const auto& jb : j["buildings"]) {
            check_keys(jb, {"footprint", "height_m", "roof_color"}, "building");
            BuildingSpec b;
            if (jb.contains("footprint")) {
                const auto& f = jb["footprint"];
                if (!f.is_array() || f.size() != 4)
                    throw InvalidSpec("scene spec: building.footprint must be [x, y, w, h]");
                b.x = num(f[0], "footprint");
                b.y = num(f[1], "footprint");
                b.w = num(f[2], "footprint");
                b.h = num(f[3], "footprint");
            }
            if (jb.contains("height_m"))
                b.height_m = num(jb["height_m"], "building.height_m");
            if (jb.contains("roof_color"))
                b.roof_color = read_color(jb["roof_color"], "building.roof_color");
            s.buildings.push_back(b);
        }
    }
    s.validate();
    return s;
}

std::string scene_spec_to_json(const SceneSpec& s) {
    ordered_json j;
    j["seed"] = s.seed;
    j["frame_count"] = s.frame_count;
    j["frame_rate_hz"] = s.frame_rate_hz;
    j["image"] = {{"width", s.image.width},
                  {"height", s.image.height},
                  {"f", s.image.f},
                  {"u", s.image.u},
                  {"v", s.image.v}};
    j["orbit"] = {{"radius_m", s.orbit.radius_m},
                  {"altitude_m", s.orbit.altitude_m},
                  {"angular_rate_rad", s.orbit.angular_rate_rad},
                  {"start_angle_rad", s.orbit.start_angle_rad},
                  {"center", {s.orbit.center_x, s.orbit.center_y}}};
    j["plane"] = {{"width", s.plane.output_width},
                  {"height", s.plane.output_height},
                  {"scale_m_per_px", s.plane.plane_scale},
                  {"origin", {s.plane.plane_origin.x(), s.plane.plane_origin.y()}}};
    j["texture"] = {{"base", s.texture.base},
                    {"amplitude", s.texture.amplitude},
                    {"waves", s.texture.waves},
                    {"min_wavelength_m", s.texture.min_wavelength_m},
                    {"max_wavelength_m", s.texture.max_wavelength_m}};
    j["vehicles"] = ordered_json::array();
    for (const RectObject& o : s.vehicles)
        j["vehicles"].push_back({{"start", {o.x, o.y}},
                                 {"velocity", {o.vx, o.vy}},
                                 {"size", {o.w, o.h}},
                                 {"color", o.color},
                                 {"height_m", o.height_m}});
    j["parked"] = ordered_json::array();
    for (const RectObject& o : s.parked)
        j["parked"].push_back({{"position", {o.x, o.y}},
                               {"size", {o.w, o.h}},
                               {"color", o.color},
                               {"height_m", o.height_m}});
    j["buildings"] = ordered_json::array();
    for (const BuildingSpec& b : s.buildings)
        j["buildings"].push_back({{"footprint", {b.x, b.y, b.w, b.h}},
                                  {"height_m", b.height_m},
                                  {"roof_color", b.roof_color}});
    return j.dump(2) + "\n";
}

SceneSpec load_scene_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open scene spec: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return scene_spec_from_json(buf.str());
}

void save_scene_spec(const SceneSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write scene spec: " + path);
    out << scene_spec_to_json(spec);
}

} // namespace skyflux::synth

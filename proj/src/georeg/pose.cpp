#include "skyflux/georeg/pose.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace skyflux::georeg {

void CameraPose::validate() const {
    if (!(f > 0.0) || !std::isfinite(f))
        throw DegeneratePose("pose: focal length must be positive");
    if (!std::isfinite(u) || !std::isfinite(v))
        throw DegeneratePose("pose: non-finite principal point");
    if (!R.allFinite() || !t.allFinite())
        throw DegeneratePose("pose: non-finite rotation or translation");
    Eigen::Matrix3d I = R * R.transpose();
    if ((I - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6)
        throw DegeneratePose("pose: R is not orthonormal");
    if (R.determinant() < 0.0)
        throw DegeneratePose("pose: R is a reflection");
}

namespace {

std::vector<double> parse_csv_row(const std::string& line, int line_no, size_t expect) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            size_t used = 0;
            double v = std::stod(cell, &used);
            while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                ++used;
            if (used != cell.size())
                throw std::invalid_argument(cell);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ParseError("pose csv line " + std::to_string(line_no) +
                             ": bad number '" + cell + "'");
        }
    }
    if (out.size() != expect)
        throw ParseError("pose csv line " + std::to_string(line_no) + ": expected " +
                         std::to_string(expect) + " fields, got " +
                         std::to_string(out.size()));
    return out;
}

} // namespace

std::vector<CameraPose> load_poses(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open pose file: " + path);
    std::vector<CameraPose> poses;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen && line.find("frame_index") != std::string::npos) {
            header_seen = true;
            continue;
        }
        std::vector<double> v = parse_csv_row(line, line_no, 16);
        CameraPose p;
        p.frame_index = static_cast<int>(v[0]);
        p.f = v[1];
        p.u = v[2];
        p.v = v[3];
        p.R << v[4], v[5], v[6],
               v[7], v[8], v[9],
               v[10], v[11], v[12];
        p.t = Eigen::Vector3d(v[13], v[14], v[15]);
        p.validate();
        poses.push_back(p);
    }
    return poses;
}

void save_poses(const std::vector<CameraPose>& poses, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write pose file: " + path);
    out << "frame_index,f,u,v,r11,r12,r13,r21,r22,r23,r31,r32,r33,tx,ty,tz\n";
    out.precision(17);
    for (const CameraPose& p : poses) {
        out << p.frame_index << ',' << p.f << ',' << p.u << ',' << p.v;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                out << ',' << p.R(r, c);
        for (int i = 0; i < 3; ++i)
            out << ',' << p.t(i);
        out << '\n';
    }
}

} // namespace skyflux::georeg

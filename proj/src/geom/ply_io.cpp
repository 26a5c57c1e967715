#include "ukp/geom/ply_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ukp/errors.hpp"

namespace ukp::geom {

namespace {

struct Property {
    std::string type;
    std::string name;
};

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

PointCloud read_ply(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);

    PointCloud pc;
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return true;
        }
        return false;
    };

    if (!next_line() || line != "ply") fail(path, line_no, "missing 'ply' magic");
    if (!next_line() || line.rfind("format ascii", 0) != 0) fail(path, line_no, "only ascii PLY is supported");

    int64_t vertex_count = -1;
    int64_t face_count = 0;
    std::vector<Property> vertex_props;
    std::string current_element;

    for (;;) {
        if (!next_line()) fail(path, line_no, "unexpected end of header");
        if (line == "end_header") break;
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "comment") {
            std::string kind;
            ss >> kind;
            if (kind == "symmetry_plane") {
                SymmetryPlane plane;
                if (!(ss >> plane.normal.x >> plane.normal.y >> plane.normal.z >> plane.offset))
                    fail(path, line_no, "malformed symmetry_plane comment");
                plane.normal = plane.normal.normalized();
                pc.symmetry_plane = plane;
            } else if (kind == "keypoint") {
                int64_t idx;
                if (!(ss >> idx)) fail(path, line_no, "malformed keypoint comment");
                pc.gt_keypoints.push_back(idx);
            }
            continue;
        }
        if (tok == "element") {
            std::string name;
            int64_t count;
            if (!(ss >> name >> count)) fail(path, line_no, "malformed element line");
            current_element = name;
            if (name == "vertex") vertex_count = count;
            if (name == "face") face_count = count;
            continue;
        }
        if (tok == "property") {
            if (current_element != "vertex") continue;  // properties of other elements are irrelevant
            Property p;
            ss >> p.type;
            if (p.type == "list") {
                std::string t1, t2;
                ss >> t1 >> t2 >> p.name;
            } else {
                ss >> p.name;
            }
            if (p.name.empty()) fail(path, line_no, "malformed property line");
            vertex_props.push_back(p);
            continue;
        }
        if (tok == "obj_info") continue;
        fail(path, line_no, "unknown header line: " + line);
    }

    if (face_count > 0) fail(path, line_no, "mesh input rejected: file declares " + std::to_string(face_count) + " faces");
    if (vertex_count < 0) fail(path, line_no, "no vertex element");

    int ix = -1, iy = -1, iz = -1, ipart = -1, icorr = -1;
    for (size_t i = 0; i < vertex_props.size(); ++i) {
        const std::string& n = vertex_props[i].name;
        if (n == "x") ix = static_cast<int>(i);
        else if (n == "y") iy = static_cast<int>(i);
        else if (n == "z") iz = static_cast<int>(i);
        else if (n == "part") ipart = static_cast<int>(i);
        else if (n == "corr") icorr = static_cast<int>(i);
        else
            std::cerr << "warning: " << path << ": skipping unknown vertex property '" << n << "'\n";
    }
    if (ix < 0 || iy < 0 || iz < 0) fail(path, line_no, "vertex element lacks x/y/z properties");

    pc.points.reserve(static_cast<size_t>(vertex_count));
    if (ipart >= 0) pc.part_labels.reserve(static_cast<size_t>(vertex_count));
    if (icorr >= 0) pc.correspondence_ids.reserve(static_cast<size_t>(vertex_count));

    std::vector<double> fields(vertex_props.size());
    for (int64_t v = 0; v < vertex_count; ++v) {
        if (!next_line()) fail(path, line_no, "unexpected end of file in vertex data");
        std::istringstream ss(line);
        for (size_t i = 0; i < vertex_props.size(); ++i)
            if (!(ss >> fields[i])) fail(path, line_no, "malformed vertex row");
        pc.points.emplace_back(static_cast<float>(fields[static_cast<size_t>(ix)]),
                               static_cast<float>(fields[static_cast<size_t>(iy)]),
                               static_cast<float>(fields[static_cast<size_t>(iz)]));
        if (ipart >= 0) pc.part_labels.push_back(static_cast<int>(fields[static_cast<size_t>(ipart)]));
        if (icorr >= 0) pc.correspondence_ids.push_back(static_cast<int>(fields[static_cast<size_t>(icorr)]));
    }

    for (int64_t k : pc.gt_keypoints)
        if (k < 0 || k >= pc.size()) throw ParseError(path + ": keypoint index " + std::to_string(k) + " out of range");
    return pc;
}

namespace {

void write_ply_impl(const std::string& path, const PointCloud& pc, const std::vector<float>* colors) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp + " for writing");
        os << "ply\nformat ascii 1.0\n";
        if (pc.symmetry_plane) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "comment symmetry_plane %.9g %.9g %.9g %.9g\n",
                          pc.symmetry_plane->normal.x, pc.symmetry_plane->normal.y,
                          pc.symmetry_plane->normal.z, pc.symmetry_plane->offset);
            os << buf;
        }
        for (int64_t k : pc.gt_keypoints) os << "comment keypoint " << k << "\n";
        os << "element vertex " << pc.size() << "\n";
        os << "property float x\nproperty float y\nproperty float z\n";
        if (pc.has_labels()) os << "property int part\n";
        if (pc.has_correspondence()) os << "property int corr\n";
        if (colors) os << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
        os << "end_header\n";
        char buf[160];
        for (int64_t i = 0; i < pc.size(); ++i) {
            const Vec3& p = pc.points[static_cast<size_t>(i)];
            int n = std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g", p.x, p.y, p.z);
            os.write(buf, n);
            if (pc.has_labels()) os << " " << pc.part_labels[static_cast<size_t>(i)];
            if (pc.has_correspondence()) os << " " << pc.correspondence_ids[static_cast<size_t>(i)];
            if (colors) {
                float v = std::clamp((*colors)[static_cast<size_t>(i)], 0.0f, 1.0f);
                int red = static_cast<int>(std::lround(v * 255.0));
                os << " " << red << " 0 " << (255 - red);
            }
            os << "\n";
        }
        if (!os) throw IoError("write failure on " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp + " to " + path);
}

}  // namespace

void write_ply(const std::string& path, const PointCloud& pc) { write_ply_impl(path, pc, nullptr); }

void write_ply_colored(const std::string& path, const PointCloud& pc, const std::vector<float>& values) {
    if (values.size() != pc.points.size()) throw IoError("write_ply_colored: values size mismatch");
    // Color-only output: annotations are dropped so viewers see plain XYZRGB.
    PointCloud bare;
    bare.points = pc.points;
    write_ply_impl(path, bare, &values);
}

}  // namespace ukp::geom

#include "satground/formats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "satground/errors.hpp"
#include "satground/image.hpp"

namespace satground {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void fail_at(const std::filesystem::path& path, int line_no, const std::string& msg) {
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
}

double to_double(const std::filesystem::path& path, int line_no, const std::string& tok) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail_at(path, line_no, "expected a number, got '" + tok + "'");
    }
}

int to_int(const std::filesystem::path& path, int line_no, const std::string& tok) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail_at(path, line_no, "expected an integer, got '" + tok + "'");
    }
}

std::vector<double> parse_csv_doubles(const std::filesystem::path& path, int line_no,
                                      const std::string& s, std::size_t expect) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(path, line_no, item));
    if (out.size() != expect)
        fail_at(path, line_no,
                "expected " + std::to_string(expect) + " comma-separated values, got " +
                    std::to_string(out.size()));
    return out;
}

}  // namespace

// --- Mesh -------------------------------------------------------------------

void write_mesh(const geom::TriangleMesh& mesh, const std::filesystem::path& path) {
    if (mesh.textured() && mesh.face_uvs.size() != mesh.faces.size())
        throw ContractError("textured mesh must carry one UV triple per face");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "satground-mesh v1\n";
    if (mesh.textured()) {
        std::filesystem::path atlas_path = path;
        atlas_path.replace_extension(".atlas.ppm");
        write_ppm(mesh.atlas, atlas_path);
        out << "atlas " << atlas_path.filename().string() << "\n";
    }
    for (const auto& v : mesh.vertices)
        out << "v " << fmt_double(v.x) << " " << fmt_double(v.y) << " " << fmt_double(v.z) << "\n";
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        const auto& f = mesh.faces[i];
        out << "f " << f[0] << " " << f[1] << " " << f[2];
        if (mesh.textured()) {
            for (int k = 0; k < 3; ++k)
                out << " " << fmt_double(mesh.face_uvs[i][k][0]) << " "
                    << fmt_double(mesh.face_uvs[i][k][1]);
        }
        out << "\n";
    }
    if (!out) throw IoError("failed writing " + path.string());
}

geom::TriangleMesh read_mesh(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line) || (++line_no, line != "satground-mesh v1"))
        fail_at(path, line_no, "expected header 'satground-mesh v1'");

    geom::TriangleMesh mesh;
    std::string atlas_rel;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream iss(line);
        std::string key;
        iss >> key;
        if (key == "atlas") {
            iss >> atlas_rel;
            if (atlas_rel.empty()) fail_at(path, line_no, "atlas expects a path");
        } else if (key == "v") {
            std::string a, b, c;
            if (!(iss >> a >> b >> c)) fail_at(path, line_no, "v expects 3 coordinates");
            mesh.vertices.push_back({to_double(path, line_no, a), to_double(path, line_no, b),
                                     to_double(path, line_no, c)});
        } else if (key == "f") {
            std::vector<std::string> toks;
            std::string t;
            while (iss >> t) toks.push_back(t);
            if (toks.size() != 3 && toks.size() != 9)
                fail_at(path, line_no, "f expects 3 indices, optionally followed by 6 UV values");
            std::array<int, 3> idx{to_int(path, line_no, toks[0]), to_int(path, line_no, toks[1]),
                                   to_int(path, line_no, toks[2])};
            mesh.faces.push_back(idx);
            if (toks.size() == 9) {
                std::array<std::array<double, 2>, 3> uv;
                for (int k = 0; k < 3; ++k)
                    uv[k] = {to_double(path, line_no, toks[3 + 2 * k]),
                             to_double(path, line_no, toks[4 + 2 * k])};
                mesh.face_uvs.push_back(uv);
            }
        } else {
            fail_at(path, line_no, "unknown directive '" + key + "'");
        }
    }
    if (!mesh.face_uvs.empty() && mesh.face_uvs.size() != mesh.faces.size())
        fail_at(path, line_no, "mesh mixes textured and untextured faces");
    if (!atlas_rel.empty()) mesh.atlas = read_ppm(path.parent_path() / atlas_rel);
    for (const auto& f : mesh.faces)
        for (int i : f)
            if (i < 0 || std::size_t(i) >= mesh.vertices.size())
                throw IoError(path.string() + ": face index " + std::to_string(i) +
                              " out of range");
    return mesh;
}

// --- Cameras ------------------------------------------------------------------

void write_cameras(const std::vector<CameraRecord>& cams, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "satground-cameras v1\n";
    for (const auto& c : cams) {
        if (!c.fov_deg.has_value() && !c.intrinsics.has_value())
            throw ContractError("camera record needs either fov or fx/fy/cx/cy");
        out << "cam id=" << c.id << " w=" << c.width << " h=" << c.height;
        if (c.fov_deg)
            out << " fov=" << fmt_double(*c.fov_deg);
        else
            out << " fx=" << fmt_double(c.intrinsics->fx) << " fy=" << fmt_double(c.intrinsics->fy)
                << " cx=" << fmt_double(c.intrinsics->cx) << " cy=" << fmt_double(c.intrinsics->cy);
        out << " near=" << fmt_double(c.near_m) << " far=" << fmt_double(c.far_m);
        out << " R=";
        for (int i = 0; i < 9; ++i) out << (i ? "," : "") << fmt_double(c.pose.rotation.m[i]);
        out << " t=" << fmt_double(c.pose.translation.x) << "," << fmt_double(c.pose.translation.y)
            << "," << fmt_double(c.pose.translation.z);
        if (!c.image_path.empty()) out << " image=" << c.image_path;
        out << "\n";
    }
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<CameraRecord> read_cameras(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line) || (++line_no, line != "satground-cameras v1"))
        fail_at(path, line_no, "expected header 'satground-cameras v1'");

    std::vector<CameraRecord> cams;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream iss(line);
        std::string tok;
        iss >> tok;
        if (tok != "cam") fail_at(path, line_no, "expected a 'cam' line");

        CameraRecord rec;
        geom::Intrinsics intr;
        bool has_fx = false, has_fy = false, has_cx = false, has_cy = false;
        bool has_id = false, has_w = false, has_h = false, has_r = false, has_t = false;
        while (iss >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) fail_at(path, line_no, "expected key=value, got '" + tok + "'");
            std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "id") rec.id = to_int(path, line_no, val), has_id = true;
            else if (key == "w") rec.width = to_int(path, line_no, val), has_w = true;
            else if (key == "h") rec.height = to_int(path, line_no, val), has_h = true;
            else if (key == "fov") rec.fov_deg = to_double(path, line_no, val);
            else if (key == "fx") intr.fx = to_double(path, line_no, val), has_fx = true;
            else if (key == "fy") intr.fy = to_double(path, line_no, val), has_fy = true;
            else if (key == "cx") intr.cx = to_double(path, line_no, val), has_cx = true;
            else if (key == "cy") intr.cy = to_double(path, line_no, val), has_cy = true;
            else if (key == "near") rec.near_m = to_double(path, line_no, val);
            else if (key == "far") rec.far_m = to_double(path, line_no, val);
            else if (key == "R") {
                auto v = parse_csv_doubles(path, line_no, val, 9);
                std::copy(v.begin(), v.end(), rec.pose.rotation.m.begin());
                has_r = true;
            } else if (key == "t") {
                auto v = parse_csv_doubles(path, line_no, val, 3);
                rec.pose.translation = {v[0], v[1], v[2]};
                has_t = true;
            } else if (key == "image") {
                rec.image_path = val;
            } else {
                fail_at(path, line_no, "unknown camera field '" + key + "'");
            }
        }
        if (!has_id || !has_w || !has_h) fail_at(path, line_no, "camera needs id, w and h");
        if (!has_r || !has_t) fail_at(path, line_no, "camera needs R and t");
        if (has_fx || has_fy || has_cx || has_cy) {
            if (!(has_fx && has_fy && has_cx && has_cy))
                fail_at(path, line_no, "fx, fy, cx and cy must appear together");
            rec.intrinsics = intr;
        }
        if (rec.fov_deg.has_value() == rec.intrinsics.has_value())
            fail_at(path, line_no, "camera needs exactly one of fov or fx/fy/cx/cy");
        cams.push_back(std::move(rec));
    }
    return cams;
}

render::GroundCamera to_ground_camera(const CameraRecord& rec) {
    if (!rec.fov_deg) throw ContractError("camera record lacks a fov; not a ground camera");
    render::GroundCamera cam;
    cam.pose = rec.pose;
    cam.fov_deg = *rec.fov_deg;
    cam.width_px = rec.width;
    cam.height_px = rec.height;
    cam.near_m = rec.near_m;
    cam.far_m = rec.far_m;
    cam.validate();
    return cam;
}

geom::SatelliteView to_satellite_view(const CameraRecord& rec, const std::filesystem::path& base_dir) {
    if (!rec.intrinsics) throw ContractError("camera record lacks fx/fy/cx/cy; not a satellite view");
    geom::SatelliteView view;
    view.intrinsics = *rec.intrinsics;
    view.pose = rec.pose;
    if (!rec.image_path.empty()) {
        view.image = read_image(base_dir / rec.image_path);
    } else {
        view.image = Image::rgb(rec.width, rec.height, 0.5f, 0.5f, 0.5f);
    }
    if (view.image.width != rec.width || view.image.height != rec.height)
        throw ValidationError("camera image dimensions disagree with the camera record");
    view.validate();
    return view;
}

// --- Point clouds -------------------------------------------------------------

void write_ply(const geom::PointCloud& cloud, const std::filesystem::path& path) {
    if (cloud.has_colors() && cloud.colors.size() != cloud.points.size())
        throw ContractError("point cloud colors must match point count");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << cloud.points.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    if (cloud.has_colors())
        out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const auto& p = cloud.points[i];
        out << fmt_double(p.x) << " " << fmt_double(p.y) << " " << fmt_double(p.z);
        if (cloud.has_colors()) {
            for (int c = 0; c < 3; ++c) {
                int v = int(std::lround(std::clamp(cloud.colors[i][c], 0.0f, 1.0f) * 255.0f));
                out << " " << v;
            }
        }
        out << "\n";
    }
    if (!out) throw IoError("failed writing " + path.string());
}

geom::PointCloud read_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    int line_no = 0;
    auto next = [&]() {
        if (!std::getline(in, line)) fail_at(path, line_no, "unexpected end of file");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
    };
    next();
    if (line != "ply") fail_at(path, line_no, "not a PLY file");
    next();
    if (line != "format ascii 1.0") fail_at(path, line_no, "only ascii 1.0 PLY is supported");

    std::size_t count = 0;
    std::vector<std::string> props;
    for (;;) {
        next();
        std::istringstream iss(line);
        std::string key;
        iss >> key;
        if (key == "end_header") break;
        if (key == "comment") continue;
        if (key == "element") {
            std::string name;
            iss >> name >> count;
            if (name != "vertex") fail_at(path, line_no, "only vertex elements are supported");
        } else if (key == "property") {
            std::string type, name;
            iss >> type >> name;
            props.push_back(name);
        } else {
            fail_at(path, line_no, "unknown header directive '" + key + "'");
        }
    }
    bool has_color = std::find(props.begin(), props.end(), "red") != props.end();
    std::vector<std::string> expected = {"x", "y", "z"};
    if (has_color) {
        expected.push_back("red");
        expected.push_back("green");
        expected.push_back("blue");
    }
    if (props != expected)
        fail_at(path, line_no, "expected properties x y z [red green blue] in order");

    geom::PointCloud cloud;
    cloud.points.reserve(count);
    if (has_color) cloud.colors.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        next();
        std::istringstream iss(line);
        std::string xs, ys, zs;
        if (!(iss >> xs >> ys >> zs)) fail_at(path, line_no, "vertex line too short");
        cloud.points.push_back({to_double(path, line_no, xs), to_double(path, line_no, ys),
                                to_double(path, line_no, zs)});
        if (has_color) {
            int r, g, b;
            if (!(iss >> r >> g >> b)) fail_at(path, line_no, "vertex line lacks colors");
            cloud.colors.push_back({float(r) / 255.0f, float(g) / 255.0f, float(b) / 255.0f});
        }
    }
    return cloud;
}

}  // namespace satground

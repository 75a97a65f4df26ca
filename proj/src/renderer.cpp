#include "satground/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "satground/errors.hpp"
#include "satground/parallel.hpp"

namespace satground::render {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ClipVert {
    Vec3 cam;  // camera space
    double u = 0, v = 0;
};

struct ScreenVert {
    double x = 0, y = 0;  // continuous pixel coordinates
    double z = 0;         // camera-space depth
    double u = 0, v = 0;
};

struct ScreenTri {
    ScreenVert v[3];
    int face_id = 0;
};

// Clips a camera-space triangle against z >= near; emits 0, 1 or 2 triangles
// worth of polygon vertices (up to 4).
int clip_near(const ClipVert in[3], double near_z, ClipVert out[4]) {
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        const ClipVert& a = in[i];
        const ClipVert& b = in[(i + 1) % 3];
        bool a_in = a.cam.z >= near_z, b_in = b.cam.z >= near_z;
        if (a_in) out[n++] = a;
        if (a_in != b_in) {
            double t = (near_z - a.cam.z) / (b.cam.z - a.cam.z);
            ClipVert m;
            m.cam = a.cam + (b.cam - a.cam) * t;
            m.cam.z = near_z;  // pin against rounding
            m.u = a.u + (b.u - a.u) * t;
            m.v = a.v + (b.v - a.v) * t;
            out[n++] = m;
        }
    }
    return n;
}

inline double edge_fn(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Top-left fill rule for a counter-clockwise (positive-area, y-down) edge
// s -> t: horizontal edges pointing +x are "top", upward edges are "left".
inline bool edge_is_top_left(const ScreenVert& s, const ScreenVert& t) {
    double dy = t.y - s.y;
    if (dy == 0.0) return t.x - s.x > 0.0;
    return dy < 0.0;
}

struct RasterBuffers {
    Image* color = nullptr;  // may be null for depth-only passes
    Image* depth = nullptr;
    std::vector<int>* face_id = nullptr;
    const Image* atlas = nullptr;  // null -> mid-gray
    double far_z = kInf;
};

void raster_rows(const std::vector<ScreenTri>& tris, int width, int y_begin, int y_end,
                 const RasterBuffers& buf) {
    for (const auto& tri : tris) {
        ScreenVert a = tri.v[0], b = tri.v[1], c = tri.v[2];
        double area2 = edge_fn(a.x, a.y, b.x, b.y, c.x, c.y);
        if (area2 == 0.0) continue;
        if (area2 < 0.0) {
            std::swap(b, c);
            area2 = -area2;
        }

        int x0 = std::max(0, int(std::floor(std::min({a.x, b.x, c.x}) - 0.5)));
        int x1 = std::min(width - 1, int(std::ceil(std::max({a.x, b.x, c.x}) - 0.5)));
        int y0 = std::max(y_begin, int(std::floor(std::min({a.y, b.y, c.y}) - 0.5)));
        int y1 = std::min(y_end - 1, int(std::ceil(std::max({a.y, b.y, c.y}) - 0.5)));
        if (x0 > x1 || y0 > y1) continue;

        const bool tl_bc = edge_is_top_left(b, c);  // opposite vertex a
        const bool tl_ca = edge_is_top_left(c, a);  // opposite vertex b
        const bool tl_ab = edge_is_top_left(a, b);  // opposite vertex c

        const double inv_za = 1.0 / a.z, inv_zb = 1.0 / b.z, inv_zc = 1.0 / c.z;

        for (int py = y0; py <= y1; ++py) {
            double sy = py + 0.5;
            for (int px = x0; px <= x1; ++px) {
                double sx = px + 0.5;
                double w_bc = edge_fn(b.x, b.y, c.x, c.y, sx, sy);
                double w_ca = edge_fn(c.x, c.y, a.x, a.y, sx, sy);
                double w_ab = edge_fn(a.x, a.y, b.x, b.y, sx, sy);
                bool cover = (w_bc > 0.0 || (w_bc == 0.0 && tl_bc)) &&
                             (w_ca > 0.0 || (w_ca == 0.0 && tl_ca)) &&
                             (w_ab > 0.0 || (w_ab == 0.0 && tl_ab));
                if (!cover) continue;

                double la = w_bc / area2, lb = w_ca / area2, lc = w_ab / area2;
                double inv_z = la * inv_za + lb * inv_zb + lc * inv_zc;
                double z = 1.0 / inv_z;
                if (z > buf.far_z) continue;

                float& zbuf = buf.depth->at(px, py);
                int& fid = (*buf.face_id)[std::size_t(py) * width + px];
                // Compare at the storage precision, or a repeated face whose
                // depth rounded up on the first write would beat itself; lower
                // face index wins exact ties, which keeps the result
                // independent of submission order.
                const float fz = float(z);
                if (!(fz < zbuf || (fz == zbuf && tri.face_id < fid))) continue;
                zbuf = fz;
                fid = tri.face_id;

                if (buf.color) {
                    if (buf.atlas) {
                        double u = (la * a.u * inv_za + lb * b.u * inv_zb + lc * c.u * inv_zc) / inv_z;
                        double v = (la * a.v * inv_za + lb * b.v * inv_zb + lc * c.v * inv_zc) / inv_z;
                        int tx = std::clamp(int(std::floor(u * buf.atlas->width)), 0, buf.atlas->width - 1);
                        int ty = std::clamp(int(std::floor(v * buf.atlas->height)), 0, buf.atlas->height - 1);
                        for (int ch = 0; ch < 3; ++ch)
                            buf.color->at(px, py, ch) = buf.atlas->at(tx, ty, ch);
                    } else {
                        for (int ch = 0; ch < 3; ++ch) buf.color->at(px, py, ch) = 0.5f;
                    }
                }
            }
        }
    }
}

// Shared vertex pipeline: camera space -> near clip -> screen triangles.
// project maps a camera-space point to continuous pixel coordinates.
template <typename ProjectFn>
std::vector<ScreenTri> build_screen_triangles(const geom::TriangleMesh& mesh,
                                              const RigidTransform& pose, double near_z,
                                              const ProjectFn& project) {
    std::vector<ScreenTri> tris;
    tris.reserve(mesh.faces.size());
    const bool textured = mesh.textured();
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& f = mesh.faces[fi];
        ClipVert cv[3];
        for (int k = 0; k < 3; ++k) {
            cv[k].cam = pose.apply(mesh.vertices[f[k]]);
            if (textured) {
                cv[k].u = mesh.face_uvs[fi][k][0];
                cv[k].v = mesh.face_uvs[fi][k][1];
            }
        }
        ClipVert poly[4];
        int n = clip_near(cv, near_z, poly);
        for (int k = 2; k < n; ++k) {
            ScreenTri tri;
            tri.face_id = int(fi);
            const ClipVert* corners[3] = {&poly[0], &poly[k - 1], &poly[k]};
            for (int j = 0; j < 3; ++j) {
                const ClipVert& p = *corners[j];
                auto [sx, sy] = project(p.cam);
                tri.v[j] = {sx, sy, p.cam.z, p.u, p.v};
            }
            tris.push_back(tri);
        }
    }
    return tris;
}

}  // namespace

void GroundCamera::validate() const {
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw UsageError("fov_deg must lie strictly in (0, 180)");
    if (width_px < 1 || height_px < 1) throw UsageError("camera dimensions must be >= 1");
    if (!(near_m > 0.0 && near_m < far_m)) throw UsageError("require 0 < near_m < far_m");
    if (pose.rotation.orthonormality_error() >= 1e-9)
        throw ContractError("camera rotation is not orthonormal");
}

void Trajectory::validate() const {
    for (std::size_t i = 0; i + 1 < cameras.size(); ++i) {
        double d = (cameras[i + 1].pose.center() - cameras[i].pose.center()).norm();
        if (std::abs(d - spacing_m) > 1e-6)
            throw ContractError("trajectory spacing violated between cameras " + std::to_string(i) +
                                " and " + std::to_string(i + 1));
    }
}

ProjectedVertex project_vertex(const GroundCamera& cam, const Vec3& p_world) {
    Vec3 pc = cam.pose.apply(p_world);
    ProjectedVertex out;
    out.depth = pc.z;
    out.in_front = pc.z > 0.0;
    if (out.in_front) {
        double f = cam.focal_px();
        out.x = f * pc.x / pc.z + cam.width_px / 2.0;
        out.y = -f * pc.y / pc.z + cam.height_px / 2.0;
    }
    return out;
}

Framebuffer rasterize(const geom::TriangleMesh& mesh, const GroundCamera& cam,
                      const std::array<float, 3>& clear_color) {
    cam.validate();
    Framebuffer fb;
    fb.color = Image::rgb(cam.width_px, cam.height_px, clear_color[0], clear_color[1], clear_color[2]);
    fb.depth = Image(cam.width_px, cam.height_px, 1, float(kInf));
    if (mesh.faces.empty()) return fb;

    const double f = cam.focal_px();
    const double cx = cam.width_px / 2.0, cy = cam.height_px / 2.0;
    auto project = [&](const Vec3& pc) {
        return std::pair<double, double>{f * pc.x / pc.z + cx, -f * pc.y / pc.z + cy};
    };
    auto tris = build_screen_triangles(mesh, cam.pose, cam.near_m, project);

    std::vector<int> face_id(std::size_t(cam.width_px) * cam.height_px, -1);
    RasterBuffers buf;
    buf.color = &fb.color;
    buf.depth = &fb.depth;
    buf.face_id = &face_id;
    buf.atlas = mesh.textured() ? &mesh.atlas : nullptr;
    buf.far_z = cam.far_m;

    parallel_for(0, cam.height_px,
                 [&](int y0, int y1) { raster_rows(tris, cam.width_px, y0, y1, buf); });
    return fb;
}

std::vector<Framebuffer> render_sequence(const geom::TriangleMesh& mesh, const Trajectory& traj) {
    if (traj.cameras.empty()) throw UsageError("trajectory must contain at least one camera");
    traj.validate();
    std::vector<Framebuffer> frames;
    frames.reserve(traj.cameras.size());
    for (const auto& cam : traj.cameras) frames.push_back(rasterize(mesh, cam));
    return frames;
}

Trajectory make_trajectory(const RigidTransform& start_pose, double heading_deg, double step_m,
                           int count, const GroundCamera& cam_template) {
    if (count < 1) throw UsageError("trajectory count must be >= 1");
    if (!(step_m > 0.0)) throw UsageError("trajectory step must be positive");
    Trajectory traj;
    traj.spacing_m = step_m;
    const Vec3 dir = direction_from_angles(heading_deg, 0.0);
    const Vec3 c0 = start_pose.center();
    for (int i = 0; i < count; ++i) {
        GroundCamera cam = cam_template;
        cam.pose.rotation = start_pose.rotation;
        Vec3 center = c0 + dir * (double(i) * step_m);
        cam.pose.translation = -(start_pose.rotation * center);
        cam.validate();
        traj.cameras.push_back(cam);
    }
    traj.validate();
    return traj;
}

Image render_view_depth(const geom::TriangleMesh& mesh, const geom::Intrinsics& intr,
                        const RigidTransform& pose, int width, int height) {
    Image depth(width, height, 1, float(kInf));
    if (mesh.faces.empty()) return depth;
    // Satellite views use pixel-index intrinsics; +0.5 moves them onto the
    // continuous-coordinate grid the rasterizer samples.
    auto project = [&](const Vec3& pc) {
        return std::pair<double, double>{intr.fx * pc.x / pc.z + intr.cx + 0.5,
                                         intr.fy * pc.y / pc.z + intr.cy + 0.5};
    };
    auto tris = build_screen_triangles(mesh, pose, 1e-6, project);

    std::vector<int> face_id(std::size_t(width) * height, -1);
    RasterBuffers buf;
    buf.depth = &depth;
    buf.face_id = &face_id;
    parallel_for(0, height, [&](int y0, int y1) { raster_rows(tris, width, y0, y1, buf); });
    return depth;
}

}  // namespace satground::render

#pragma once

#include <array>
#include <limits>
#include <vector>

#include "satground/geometry.hpp"

namespace satground::render {

struct GroundCamera {
    RigidTransform pose;  // world -> camera
    double fov_deg = 75.0;
    int width_px = 256;
    int height_px = 256;
    double near_m = 0.1;
    double far_m = 1000.0;

    void validate() const;
    double focal_px() const { return (width_px / 2.0) / std::tan(deg2rad(fov_deg) / 2.0); }
};

struct Framebuffer {
    Image color;  // RGB
    Image depth;  // single channel, meters, +inf where nothing was drawn
};

struct Trajectory {
    std::vector<GroundCamera> cameras;
    double spacing_m = 0.0;

    void validate() const;  // consecutive camera centers spacing_m apart within 1e-6
};

// Continuous pixel coordinates: a point on the optical axis lands on the
// image center (W/2, H/2); pixel (i, j) covers [i, i+1) x [j, j+1) and is
// sampled at (i + 0.5, j + 0.5).
struct ProjectedVertex {
    double x = 0, y = 0;
    double depth = 0;      // camera-space forward coordinate
    bool in_front = false; // depth > 0
};
ProjectedVertex project_vertex(const GroundCamera& cam, const Vec3& p_world);

// Z-buffered triangle rasterization with the top-left fill rule,
// perspective-correct UV interpolation and nearest-texel atlas lookup.
// Triangles are clipped against the near plane; fragments beyond far_m are
// discarded. Exact depth ties resolve to the lower face index, making the
// output independent of face submission order. Untextured meshes rasterize
// mid-gray.
Framebuffer rasterize(const geom::TriangleMesh& mesh, const GroundCamera& cam,
                      const std::array<float, 3>& clear_color = {0, 0, 0});

// One framebuffer per trajectory camera, order preserving.
std::vector<Framebuffer> render_sequence(const geom::TriangleMesh& mesh, const Trajectory& traj);

// `count` cameras stepped along the world heading from the template pose.
Trajectory make_trajectory(const RigidTransform& start_pose, double heading_deg, double step_m,
                           int count, const GroundCamera& cam_template);

// Depth-only pass through a satellite view (pixel-index convention); used by
// the texture-assignment visibility test. +inf where nothing projects.
Image render_view_depth(const geom::TriangleMesh& mesh, const geom::Intrinsics& intr,
                        const RigidTransform& pose, int width, int height);

}  // namespace satground::render

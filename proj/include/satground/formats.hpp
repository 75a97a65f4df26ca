#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "satground/geometry.hpp"
#include "satground/renderer.hpp"

namespace satground {

// --- Mesh: "satground-mesh v1" -------------------------------------------
// Plain text. Header line, then:
//   atlas <relative-path>        (optional, textured meshes only)
//   v <x> <y> <z>
//   f <i0> <i1> <i2>                          (untextured)
//   f <i0> <i1> <i2> <u0> <v0> <u1> <v1> <u2> <v2>   (textured)
// The atlas image is written next to the mesh file.
void write_mesh(const geom::TriangleMesh& mesh, const std::filesystem::path& path);
geom::TriangleMesh read_mesh(const std::filesystem::path& path);

// --- Cameras: "satground-cameras v1" --------------------------------------
// One line per camera:
//   cam id=<n> w=<px> h=<px> {fov=<deg> | fx=<..> fy=<..> cx=<..> cy=<..>}
//       [near=<m> far=<m>] R=<9 row-major floats, comma separated>
//       t=<3 floats, comma separated> [image=<path>]
// fov-form cameras are ground cameras (continuous-coordinate intrinsics);
// fx/fy-form cameras are satellite views (pixel-index intrinsics).
struct CameraRecord {
    int id = 0;
    int width = 0, height = 0;
    std::optional<double> fov_deg;
    std::optional<geom::Intrinsics> intrinsics;
    double near_m = 0.1, far_m = 1000.0;
    RigidTransform pose;
    std::string image_path;  // empty when absent
};

void write_cameras(const std::vector<CameraRecord>& cams, const std::filesystem::path& path);
std::vector<CameraRecord> read_cameras(const std::filesystem::path& path);

render::GroundCamera to_ground_camera(const CameraRecord& rec);
// Loads the referenced image (relative to the camera file's directory).
geom::SatelliteView to_satellite_view(const CameraRecord& rec, const std::filesystem::path& base_dir);

// --- Point clouds ----------------------------------------------------------
// ASCII PLY with x y z [red green blue] properties.
void write_ply(const geom::PointCloud& cloud, const std::filesystem::path& path);
geom::PointCloud read_ply(const std::filesystem::path& path);

}  // namespace satground

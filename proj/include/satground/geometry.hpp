#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "satground/image.hpp"
#include "satground/math3d.hpp"

namespace satground::geom {

// Pinhole intrinsics in pixel-index units: pixel (u, v) samples the scene at
// coordinate exactly (u, v), so a point on the optical axis projects to
// (cx, cy).
struct Intrinsics {
    double fx = 0, fy = 0, cx = 0, cy = 0;
};

struct SatelliteView {
    Image image;            // RGB
    Intrinsics intrinsics;  // pixels
    RigidTransform pose;    // world -> camera, meters

    void validate() const;  // fx, fy > 0; rotation orthonormal within 1e-9
};

// Single-channel grid of depths in meters; 0 or NaN marks invalid samples.
struct DepthMap {
    Image depths;

    int width() const { return depths.width; }
    int height() const { return depths.height; }
    bool valid_at(int x, int y) const {
        float d = depths.at(x, y);
        return d > 0.0f && std::isfinite(d);
    }
};

struct PointCloud {
    std::vector<Vec3> points;
    std::vector<std::array<float, 3>> colors;  // empty, or one entry per point

    bool has_colors() const { return !colors.empty(); }
    std::size_t size() const { return points.size(); }
};

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    // Per-face, per-corner texture coordinates in [0,1]^2; empty when the mesh
    // is untextured, otherwise one entry per face.
    std::vector<std::array<std::array<double, 2>, 3>> face_uvs;
    Image atlas;

    bool textured() const { return !face_uvs.empty(); }
    // Unique undirected vertex pairs appearing in faces, sorted.
    std::vector<std::pair<int, int>> edges() const;
};

// Pixel-index projection through a satellite view.
struct PixelProjection {
    double x = 0, y = 0;
    double depth = 0;     // camera-space forward coordinate
    bool in_front = false;
};
PixelProjection project_point(const Intrinsics& intr, const RigidTransform& pose, const Vec3& p_world);

// One world point per valid depth pixel:
//   p_world = pose^-1 ( d * ((u - cx)/fx, (v - cy)/fy, 1) )
// with the color copied from the view image.
PointCloud unproject_depth(const DepthMap& depth, const SatelliteView& view);

// Voxel-grid fusion: points quantized to cells of edge voxel_m, one centroid
// per occupied cell (colors averaged), output in lexicographic cell order.
// Deterministic and invariant to the order of the input clouds.
PointCloud fuse_point_clouds(const std::vector<PointCloud>& clouds, double voxel_m);

// Pluggable point-cloud refinement stage.
struct RefinementStage {
    std::string name;
    std::function<PointCloud(const PointCloud&)> run;
};
RefinementStage identity_refinement();
// Removes points whose mean distance to their k nearest neighbors exceeds
// mean + std_multiplier * stddev of that statistic over the cloud.
RefinementStage outlier_removal_refinement(int k_neighbors, double std_multiplier);
PointCloud refine_points(const PointCloud& cloud, const RefinementStage& stage);

// Per-view grid triangulation. Every 2x2 quad of valid depths emits the two
// triangles (u,v)-(u+1,v)-(u,v+1) and (u+1,v)-(u+1,v+1)-(u,v+1); a triangle is
// dropped when any 3-D edge exceeds max_edge_m or the depth ratio across one
// of its edges exceeds max_depth_ratio. Vertices are deduplicated by pixel.
TriangleMesh triangulate_grid(const DepthMap& depth, const SatelliteView& view, double max_edge_m,
                              double max_depth_ratio);

// Reports every violated TriangleMesh invariant; empty means valid.
std::vector<std::string> mesh_validate(const TriangleMesh& mesh);

}  // namespace satground::geom

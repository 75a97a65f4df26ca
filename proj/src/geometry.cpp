#include "satground/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "satground/errors.hpp"

namespace satground::geom {

void SatelliteView::validate() const {
    if (!(intrinsics.fx > 0.0 && intrinsics.fy > 0.0)) throw ContractError("fx and fy must be positive");
    if (pose.rotation.orthonormality_error() >= 1e-9)
        throw ContractError("view rotation is not orthonormal");
}

std::vector<std::pair<int, int>> TriangleMesh::edges() const {
    std::set<std::pair<int, int>> unique;
    for (const auto& f : faces) {
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            unique.emplace(std::min(a, b), std::max(a, b));
        }
    }
    return {unique.begin(), unique.end()};
}

PixelProjection project_point(const Intrinsics& intr, const RigidTransform& pose, const Vec3& p_world) {
    Vec3 pc = pose.apply(p_world);
    PixelProjection out;
    out.depth = pc.z;
    out.in_front = pc.z > 0.0;
    if (out.in_front) {
        out.x = intr.fx * pc.x / pc.z + intr.cx;
        out.y = intr.fy * pc.y / pc.z + intr.cy;
    }
    return out;
}

PointCloud unproject_depth(const DepthMap& depth, const SatelliteView& view) {
    view.validate();
    if (depth.width() != view.image.width || depth.height() != view.image.height)
        throw ContractError("depth map dimensions do not match the view image");
    if (depth.depths.channels != 1) throw ContractError("depth map must be single channel");

    PointCloud cloud;
    const auto& intr = view.intrinsics;
    for (int v = 0; v < depth.height(); ++v) {
        for (int u = 0; u < depth.width(); ++u) {
            if (!depth.valid_at(u, v)) continue;
            double d = depth.depths.at(u, v);
            Vec3 pc{d * (u - intr.cx) / intr.fx, d * (v - intr.cy) / intr.fy, d};
            cloud.points.push_back(view.pose.apply_inverse(pc));
            cloud.colors.push_back({view.image.at(u, v, 0), view.image.at(u, v, 1), view.image.at(u, v, 2)});
        }
    }
    return cloud;
}

namespace {

struct VoxelKey {
    long long x, y, z;
    bool operator<(const VoxelKey& o) const {
        if (x != o.x) return x < o.x;
        if (y != o.y) return y < o.y;
        return z < o.z;
    }
};

struct Member {
    Vec3 p;
    std::array<float, 3> c;
};

}  // namespace

PointCloud fuse_point_clouds(const std::vector<PointCloud>& clouds, double voxel_m) {
    if (!(voxel_m > 0.0)) throw UsageError("voxel size must be positive");

    std::map<VoxelKey, std::vector<Member>> cells;
    for (const auto& cloud : clouds) {
        for (std::size_t i = 0; i < cloud.points.size(); ++i) {
            const Vec3& p = cloud.points[i];
            VoxelKey key{(long long)std::floor(p.x / voxel_m), (long long)std::floor(p.y / voxel_m),
                         (long long)std::floor(p.z / voxel_m)};
            std::array<float, 3> c = cloud.has_colors() ? cloud.colors[i] : std::array<float, 3>{0, 0, 0};
            cells[key].push_back({p, c});
        }
    }

    bool any_colors = std::any_of(clouds.begin(), clouds.end(),
                                  [](const PointCloud& c) { return c.has_colors(); });

    PointCloud out;
    out.points.reserve(cells.size());
    for (auto& [key, members] : cells) {
        // Summation order is pinned by sorting members, which makes the fused
        // centroid invariant to the order the input clouds arrived in.
        std::sort(members.begin(), members.end(), [](const Member& a, const Member& b) {
            if (a.p.x != b.p.x) return a.p.x < b.p.x;
            if (a.p.y != b.p.y) return a.p.y < b.p.y;
            if (a.p.z != b.p.z) return a.p.z < b.p.z;
            return a.c < b.c;
        });
        Vec3 sum{};
        double cr = 0, cg = 0, cb = 0;
        for (const auto& m : members) {
            sum += m.p;
            cr += m.c[0];
            cg += m.c[1];
            cb += m.c[2];
        }
        double n = double(members.size());
        out.points.push_back(sum / n);
        if (any_colors) out.colors.push_back({float(cr / n), float(cg / n), float(cb / n)});
    }
    return out;
}

RefinementStage identity_refinement() {
    return {"identity", [](const PointCloud& c) { return c; }};
}

RefinementStage outlier_removal_refinement(int k_neighbors, double std_multiplier) {
    if (k_neighbors < 1) throw UsageError("k_neighbors must be >= 1");
    return {"outlier-removal", [k_neighbors, std_multiplier](const PointCloud& cloud) {
                const std::size_t n = cloud.points.size();
                if (n <= std::size_t(k_neighbors)) return cloud;

                // Mean distance to the k nearest neighbors, brute force.
                std::vector<double> mean_dists(n);
                std::vector<double> dists;
                for (std::size_t i = 0; i < n; ++i) {
                    dists.clear();
                    dists.reserve(n - 1);
                    for (std::size_t j = 0; j < n; ++j)
                        if (j != i) dists.push_back((cloud.points[i] - cloud.points[j]).norm());
                    std::partial_sort(dists.begin(), dists.begin() + k_neighbors, dists.end());
                    double s = 0;
                    for (int k = 0; k < k_neighbors; ++k) s += dists[k];
                    mean_dists[i] = s / k_neighbors;
                }
                double mean = std::accumulate(mean_dists.begin(), mean_dists.end(), 0.0) / double(n);
                double var = 0;
                for (double d : mean_dists) var += (d - mean) * (d - mean);
                double stddev = std::sqrt(var / double(n));
                double cutoff = mean + std_multiplier * stddev;

                PointCloud out;
                for (std::size_t i = 0; i < n; ++i) {
                    if (mean_dists[i] > cutoff) continue;
                    out.points.push_back(cloud.points[i]);
                    if (cloud.has_colors()) out.colors.push_back(cloud.colors[i]);
                }
                return out;
            }};
}

PointCloud refine_points(const PointCloud& cloud, const RefinementStage& stage) {
    return stage.run(cloud);
}

TriangleMesh triangulate_grid(const DepthMap& depth, const SatelliteView& view, double max_edge_m,
                              double max_depth_ratio) {
    if (!(max_edge_m > 0.0)) throw UsageError("max_edge_m must be positive");
    if (!(max_depth_ratio > 1.0)) throw UsageError("max_depth_ratio must exceed 1");
    view.validate();
    if (depth.width() != view.image.width || depth.height() != view.image.height)
        throw ContractError("depth map dimensions do not match the view image");

    const int w = depth.width(), h = depth.height();
    const auto& intr = view.intrinsics;

    std::vector<int> vertex_of(std::size_t(w) * h, -1);
    TriangleMesh mesh;

    auto vertex_index = [&](int u, int v) {
        int& idx = vertex_of[std::size_t(v) * w + u];
        if (idx < 0) {
            double d = depth.depths.at(u, v);
            Vec3 pc{d * (u - intr.cx) / intr.fx, d * (v - intr.cy) / intr.fy, d};
            idx = int(mesh.vertices.size());
            mesh.vertices.push_back(view.pose.apply_inverse(pc));
        }
        return idx;
    };

    auto edge_ok = [&](int ua, int va, int ub, int vb) {
        double da = depth.depths.at(ua, va), db = depth.depths.at(ub, vb);
        double ratio = std::max(da, db) / std::min(da, db);
        if (ratio > max_depth_ratio) return false;
        auto p = [&](int u, int v, double d) {
            return view.pose.apply_inverse(
                Vec3{d * (u - intr.cx) / intr.fx, d * (v - intr.cy) / intr.fy, d});
        };
        return (p(ua, va, da) - p(ub, vb, db)).norm() <= max_edge_m;
    };

    for (int v = 0; v + 1 < h; ++v) {
        for (int u = 0; u + 1 < w; ++u) {
            if (!(depth.valid_at(u, v) && depth.valid_at(u + 1, v) && depth.valid_at(u, v + 1) &&
                  depth.valid_at(u + 1, v + 1)))
                continue;
            // Fixed diagonal split of the quad.
            if (edge_ok(u, v, u + 1, v) && edge_ok(u + 1, v, u, v + 1) && edge_ok(u, v + 1, u, v))
                mesh.faces.push_back({vertex_index(u, v), vertex_index(u + 1, v), vertex_index(u, v + 1)});
            if (edge_ok(u + 1, v, u + 1, v + 1) && edge_ok(u + 1, v + 1, u, v + 1) &&
                edge_ok(u, v + 1, u + 1, v))
                mesh.faces.push_back(
                    {vertex_index(u + 1, v), vertex_index(u + 1, v + 1), vertex_index(u, v + 1)});
        }
    }
    return mesh;
}

std::vector<std::string> mesh_validate(const TriangleMesh& mesh) {
    std::vector<std::string> issues;
    const int nv = int(mesh.vertices.size());
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& f = mesh.faces[fi];
        bool in_range = true;
        for (int k = 0; k < 3; ++k) {
            if (f[k] < 0 || f[k] >= nv) {
                issues.push_back("face " + std::to_string(fi) + " references vertex " + std::to_string(f[k]) +
                                 " outside [0, " + std::to_string(nv) + ")");
                in_range = false;
            }
        }
        if (!in_range) continue;
        Vec3 a = mesh.vertices[f[0]], b = mesh.vertices[f[1]], c = mesh.vertices[f[2]];
        if (cross(b - a, c - a).norm() <= 0.0)
            issues.push_back("face " + std::to_string(fi) + " is degenerate (zero area)");
    }
    if (!mesh.face_uvs.empty()) {
        if (mesh.face_uvs.size() != mesh.faces.size())
            issues.push_back("face_uvs count does not match face count");
        for (std::size_t fi = 0; fi < mesh.face_uvs.size(); ++fi)
            for (const auto& uv : mesh.face_uvs[fi])
                if (!(uv[0] >= 0.0 && uv[0] <= 1.0 && uv[1] >= 0.0 && uv[1] <= 1.0)) {
                    issues.push_back("face " + std::to_string(fi) + " has UV outside [0,1]^2");
                    break;
                }
        if (mesh.atlas.empty()) issues.push_back("textured mesh is missing its atlas image");
    }
    return issues;
}

}  // namespace satground::geom

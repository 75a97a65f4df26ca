#include "satground/texturing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "satground/errors.hpp"
#include "satground/parallel.hpp"
#include "satground/renderer.hpp"

namespace satground::geom {

namespace {

struct Tile {
    int x = 0, y = 0;  // origin inside the atlas
};

// Relative slack for the z-buffer visibility lookup: the buffer holds plane
// depth at pixel centers while vertices project at subpixel positions.
constexpr double kVisSlack = 1e-2;

bool vertex_visible(const PixelProjection& p, const Image& zbuf) {
    int px = std::clamp(int(std::lround(p.x)), 0, zbuf.width - 1);
    int py = std::clamp(int(std::lround(p.y)), 0, zbuf.height - 1);
    double z = zbuf.at(px, py);
    return p.depth <= z * (1.0 + kVisSlack) + 1e-6;
}

}  // namespace

TriangleMesh compute_texture_coords(const TriangleMesh& mesh, const std::vector<SatelliteView>& views) {
    if (views.empty()) throw UsageError("compute_texture_coords requires at least one view");
    for (const auto& f : mesh.faces)
        for (int idx : f)
            if (idx < 0 || std::size_t(idx) >= mesh.vertices.size())
                throw ContractError("face index out of range");

    std::vector<Image> zbufs(views.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
        views[i].validate();
        zbufs[i] = render::render_view_depth(mesh, views[i].intrinsics, views[i].pose,
                                             views[i].image.width, views[i].image.height);
    }

    const int n_faces = int(mesh.faces.size());
    std::vector<int> chosen_view(n_faces, -1);
    std::vector<std::array<std::array<double, 2>, 3>> proj_norm(n_faces);

    parallel_for(0, n_faces, [&](int f0, int f1) {
        for (int fi = f0; fi < f1; ++fi) {
            const auto& face = mesh.faces[fi];
            double best_area = 0.0;
            for (std::size_t vi = 0; vi < views.size(); ++vi) {
                const auto& view = views[vi];
                PixelProjection p[3];
                bool ok = true;
                for (int k = 0; k < 3 && ok; ++k) {
                    p[k] = project_point(view.intrinsics, view.pose, mesh.vertices[face[k]]);
                    ok = p[k].in_front && p[k].x >= 0.0 && p[k].x <= view.image.width - 1 &&
                         p[k].y >= 0.0 && p[k].y <= view.image.height - 1 &&
                         vertex_visible(p[k], zbufs[vi]);
                }
                if (!ok) continue;
                double area = 0.5 * std::abs((p[1].x - p[0].x) * (p[2].y - p[0].y) -
                                             (p[1].y - p[0].y) * (p[2].x - p[0].x));
                if (area > best_area) {  // ties keep the lower view index
                    best_area = area;
                    chosen_view[fi] = int(vi);
                    for (int k = 0; k < 3; ++k)
                        proj_norm[fi][k] = {p[k].x / view.image.width, p[k].y / view.image.height};
                }
            }
        }
    });

    const bool any_fallback = std::any_of(chosen_view.begin(), chosen_view.end(),
                                          [](int v) { return v < 0; });

    // Row-major shelf packing of the view images; a mid-gray strip is appended
    // only when some face needs the fallback texel, so a lone view keeps its
    // image as the whole atlas.
    int target_w = 0;
    for (const auto& v : views) target_w = std::max(target_w, v.image.width);
    std::vector<Tile> tiles(views.size());
    int cur_x = 0, cur_y = 0, shelf_h = 0;
    for (std::size_t i = 0; i < views.size(); ++i) {
        const Image& img = views[i].image;
        if (cur_x > 0 && cur_x + img.width > target_w) {
            cur_y += shelf_h;
            cur_x = 0;
            shelf_h = 0;
        }
        tiles[i] = {cur_x, cur_y};
        cur_x += img.width;
        shelf_h = std::max(shelf_h, img.height);
    }
    int atlas_h = cur_y + shelf_h;
    constexpr int kFallbackStrip = 8;
    const int fallback_y = atlas_h;
    if (any_fallback) atlas_h += kFallbackStrip;

    TriangleMesh out = mesh;
    out.atlas = Image::rgb(target_w, atlas_h, 0.5f, 0.5f, 0.5f);
    for (std::size_t i = 0; i < views.size(); ++i) {
        const Image& img = views[i].image;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                for (int c = 0; c < 3; ++c)
                    out.atlas.at(tiles[i].x + x, tiles[i].y + y, c) = img.at(x, y, c);
    }

    out.face_uvs.assign(n_faces, {});
    const double fb_u = 0.5, fb_v = (fallback_y + kFallbackStrip / 2.0) / atlas_h;
    for (int fi = 0; fi < n_faces; ++fi) {
        int vi = chosen_view[fi];
        if (vi < 0) {
            for (int k = 0; k < 3; ++k) out.face_uvs[fi][k] = {fb_u, fb_v};
            continue;
        }
        const Image& img = views[vi].image;
        for (int k = 0; k < 3; ++k) {
            out.face_uvs[fi][k] = {
                (tiles[vi].x + proj_norm[fi][k][0] * img.width) / target_w,
                (tiles[vi].y + proj_norm[fi][k][1] * img.height) / atlas_h,
            };
        }
    }
    return out;
}

}  // namespace satground::geom

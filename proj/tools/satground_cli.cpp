// satground: satellite-to-ground synthesis pipeline tool.
//
// Subcommands cover the pipeline end to end: panorama resampling, depth
// fusion, meshing, texturing, rendering, latent sampling, metrics and dataset
// management. Every subcommand is deterministic given its inputs and seed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satground/dataset.hpp"
#include "satground/errors.hpp"
#include "satground/formats.hpp"
#include "satground/geometry.hpp"
#include "satground/image.hpp"
#include "satground/metrics.hpp"
#include "satground/parallel.hpp"
#include "satground/renderer.hpp"
#include "satground/sampler.hpp"
#include "satground/spherical.hpp"
#include "satground/tensor.hpp"
#include "satground/texturing.hpp"

namespace fs = std::filesystem;
using namespace satground;

namespace {

std::string pad4(int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d", i);
    return buf;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

fs::path frame_path(const fs::path& dir, int i) { return dir / ("frame_" + pad4(i) + ".ppm"); }
fs::path depth_path(const fs::path& dir, int i) { return dir / ("depth_" + pad4(i) + ".pfm"); }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

// ---- resample-pano ----------------------------------------------------------

struct ResampleOpts {
    std::string pano;
    std::string out_dir;
    double heading = 0.0;
    std::string frame = "pano";  // angles given in the panorama or world frame
    // custom single view; the default emits the four standard views
    std::string name;
    double theta = 0.0, phi = 15.0, fov = 75.0;
    int width = 256, height = 256;
};

void run_resample(const ResampleOpts& o) {
    spherical::Panorama pano(read_image(o.pano), wrap_deg(o.heading));
    ensure_dir(o.out_dir);

    std::vector<std::pair<std::string, double>> views;
    if (!o.name.empty()) {
        views.emplace_back(o.name, o.theta);
    } else {
        // Standard four-view split of a street panorama.
        views = {{"LR", 60.0}, {"LF", 120.0}, {"RF", 240.0}, {"RR", 300.0}};
    }
    for (const auto& [label, theta] : views) {
        spherical::PerspectiveSpec spec;
        spec.theta_deg = o.frame == "world" ? wrap_deg(theta - pano.heading_deg) : wrap_deg(theta);
        spec.phi_deg = o.phi;
        spec.fov_deg = o.fov;
        spec.width_px = o.width;
        spec.height_px = o.height;
        Image view = spherical::resample_perspective(pano, spec);
        write_ppm(view, fs::path(o.out_dir) / (label + ".ppm"));
    }
}

// ---- shared camera/depth loading ---------------------------------------------

std::vector<std::pair<CameraRecord, geom::SatelliteView>> load_satellite_views(
    const fs::path& cam_file) {
    auto records = read_cameras(cam_file);
    std::vector<std::pair<CameraRecord, geom::SatelliteView>> views;
    for (const auto& rec : records)
        if (rec.intrinsics) views.emplace_back(rec, to_satellite_view(rec, cam_file.parent_path()));
    if (views.empty())
        throw ValidationError(cam_file.string() + " contains no satellite views (fx/fy/cx/cy form)");
    return views;
}

geom::DepthMap load_depth(const fs::path& depth_dir, int cam_id) {
    fs::path p = depth_path(depth_dir, cam_id);
    Image img = read_pfm(p);
    if (img.channels != 1) throw ValidationError(p.string() + " is not a single-channel depth map");
    return geom::DepthMap{std::move(img)};
}

// ---- fuse ----------------------------------------------------------------------

struct FuseOpts {
    std::string cameras;
    std::string depth_dir;
    std::string out;
    double voxel = 0.5;
    std::string refine = "none";
    int knn = 8;
    double std_mult = 2.0;
};

void run_fuse(const FuseOpts& o) {
    auto views = load_satellite_views(o.cameras);
    std::vector<geom::PointCloud> clouds;
    for (const auto& [rec, view] : views)
        clouds.push_back(geom::unproject_depth(load_depth(o.depth_dir, rec.id), view));
    geom::PointCloud fused = geom::fuse_point_clouds(clouds, o.voxel);
    geom::RefinementStage stage;
    if (o.refine == "none")
        stage = geom::identity_refinement();
    else if (o.refine == "outlier")
        stage = geom::outlier_removal_refinement(o.knn, o.std_mult);
    else
        throw UsageError("unknown refinement '" + o.refine + "' (expected none | outlier)");
    write_ply(geom::refine_points(fused, stage), o.out);
}

// ---- mesh -----------------------------------------------------------------------

struct MeshOpts {
    std::string cameras;
    std::string depth_dir;
    std::string out;
    int camera_id = -1;  // -1: the file must contain exactly one satellite view
    double max_edge = 5.0;
    double max_ratio = 1.5;
};

void run_mesh(const MeshOpts& o) {
    auto views = load_satellite_views(o.cameras);
    const geom::SatelliteView* view = nullptr;
    int cam_id = o.camera_id;
    if (cam_id < 0) {
        if (views.size() != 1)
            throw UsageError("camera file holds " + std::to_string(views.size()) +
                             " satellite views; pick one with --camera-id");
        cam_id = views[0].first.id;
        view = &views[0].second;
    } else {
        for (const auto& [rec, v] : views)
            if (rec.id == cam_id) view = &v;
        if (!view) throw UsageError("no satellite view with id " + std::to_string(cam_id));
    }
    geom::TriangleMesh mesh =
        geom::triangulate_grid(load_depth(o.depth_dir, cam_id), *view, o.max_edge, o.max_ratio);
    write_mesh(mesh, o.out);
}

// ---- texture ----------------------------------------------------------------------

struct TextureOpts {
    std::string mesh;
    std::string cameras;
    std::string out;
};

void run_texture(const TextureOpts& o) {
    geom::TriangleMesh mesh = read_mesh(o.mesh);
    auto view_pairs = load_satellite_views(o.cameras);
    std::vector<geom::SatelliteView> views;
    for (auto& [rec, v] : view_pairs) views.push_back(std::move(v));
    write_mesh(geom::compute_texture_coords(mesh, views), o.out);
}

// ---- render -----------------------------------------------------------------------

struct RenderOpts {
    std::string mesh;
    std::string out_dir;
    std::string cameras;  // fov-form camera file; empty -> trajectory flags
    std::vector<double> start;
    double heading = 0.0, pitch = 0.0, step = 10.0;
    int count = 5;
    double fov = 75.0, near = 0.1, far = 1000.0;
    int width = 256, height = 256;
};

void write_frame(const render::Framebuffer& fb, const fs::path& dir, int id) {
    write_ppm(fb.color, frame_path(dir, id));
    write_pfm(fb.depth, depth_path(dir, id));
}

void run_render(const RenderOpts& o) {
    geom::TriangleMesh mesh = read_mesh(o.mesh);
    ensure_dir(o.out_dir);
    if (!o.cameras.empty()) {
        auto records = read_cameras(o.cameras);
        int rendered = 0;
        for (const auto& rec : records) {
            if (!rec.fov_deg) continue;
            write_frame(render::rasterize(mesh, to_ground_camera(rec)), o.out_dir, rec.id);
            ++rendered;
        }
        if (rendered == 0)
            throw ValidationError(o.cameras + " contains no ground cameras (fov form)");
        return;
    }
    if (o.start.size() != 3)
        throw UsageError("--start x,y,z is required when no camera file is given");
    render::GroundCamera tmpl;
    tmpl.fov_deg = o.fov;
    tmpl.width_px = o.width;
    tmpl.height_px = o.height;
    tmpl.near_m = o.near;
    tmpl.far_m = o.far;
    RigidTransform start_pose;
    start_pose.rotation = view_rotation(o.heading, o.pitch).transposed();
    Vec3 c{o.start[0], o.start[1], o.start[2]};
    start_pose.translation = -(start_pose.rotation * c);
    render::Trajectory traj = render::make_trajectory(start_pose, o.heading, o.step, o.count, tmpl);
    auto frames = render::render_sequence(mesh, traj);

    std::vector<CameraRecord> records;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        write_frame(frames[i], o.out_dir, int(i));
        CameraRecord rec;
        rec.id = int(i);
        rec.width = o.width;
        rec.height = o.height;
        rec.fov_deg = o.fov;
        rec.near_m = o.near;
        rec.far_m = o.far;
        rec.pose = traj.cameras[i].pose;
        rec.image_path = frame_path("", int(i)).string();
        records.push_back(rec);
    }
    write_cameras(records, fs::path(o.out_dir) / "cameras.txt");
}

// ---- sample / sample-temporal -----------------------------------------------------

struct SampleOpts {
    std::vector<int> shape{1, 4, 32, 32};
    std::string init;  // sample-temporal only
    int num_views = 5;
    int steps = 20;
    double cfg_scale = 1.0;
    std::uint64_t seed = 0;
    int train_steps = 1000;
    double beta_start = 1e-4, beta_end = 0.02;
    std::string predictor = "zero";
    std::string sat_features, motion_features;
    std::string null_mode = "both";
    std::string out;
    std::string decode_dir;  // optional: decode per-view latents to images
};

sampler::NoisePredictor make_predictor(const std::string& spec,
                                       const sampler::NoiseSchedule& sched) {
    if (spec == "zero") return sampler::zero_denoiser();
    if (spec.rfind("oracle:", 0) == 0) {
        double mu = 0, sigma = 0;
        if (std::sscanf(spec.c_str() + 7, "%lf,%lf", &mu, &sigma) != 2)
            throw UsageError("oracle predictor expects oracle:<mu>,<sigma>");
        return sampler::oracle_gaussian_denoiser(mu, sigma, sched);
    }
    if (spec.rfind("file:", 0) == 0) return sampler::file_predictor(fs::path(spec.substr(5)));
    throw UsageError("unknown predictor '" + spec + "' (expected zero | oracle:<mu>,<sigma> | file:<path>)");
}

sampler::ConditionBundle make_condition(const SampleOpts& o) {
    sampler::ConditionBundle cond;
    if (!o.sat_features.empty()) cond.sat_features = read_tensor(o.sat_features);
    if (!o.motion_features.empty()) cond.motion_features = read_tensor(o.motion_features);
    return cond;
}

sampler::SampleOptions make_sample_options(const SampleOpts& o) {
    sampler::SampleOptions so;
    so.num_steps = o.steps;
    so.cfg_scale = o.cfg_scale;
    so.seed = o.seed;
    if (o.null_mode == "both")
        so.null_mode = sampler::CfgNullMode::DropBoth;
    else if (o.null_mode == "sat")
        so.null_mode = sampler::CfgNullMode::DropSat;
    else if (o.null_mode == "temporal")
        so.null_mode = sampler::CfgNullMode::DropTemporal;
    else
        throw UsageError("unknown null mode '" + o.null_mode + "' (expected both | sat | temporal)");
    return so;
}

void decode_views(const Tensor4& z, const fs::path& dir) {
    if (z.channels != 3)
        throw UsageError("--decode-dir requires 3-channel latents, got " + z.shape_str());
    ensure_dir(dir);
    auto codec = sampler::identity_codec();
    const std::size_t block = std::size_t(z.channels) * z.height * z.width;
    for (int v = 0; v < z.views; ++v) {
        Tensor4 slice(1, z.channels, z.height, z.width);
        std::copy_n(z.data.begin() + std::size_t(v) * block, block, slice.data.begin());
        write_ppm(codec.decode(slice), dir / ("view_" + pad4(v) + ".ppm"));
    }
}

void run_sample(const SampleOpts& o) {
    auto sched = sampler::make_schedule(o.train_steps, o.beta_start, o.beta_end);
    if (o.shape.size() != 4) throw UsageError("--shape expects v,c,h,w");
    sampler::LatentShape shape{o.shape[0], o.shape[1], o.shape[2], o.shape[3]};
    Tensor4 z = sampler::sample_guided(make_predictor(o.predictor, sched), make_condition(o), shape,
                                       make_sample_options(o), sched);
    write_tensor(z, o.out);
    if (!o.decode_dir.empty()) decode_views(z, o.decode_dir);
}

void run_sample_temporal(const SampleOpts& o) {
    auto sched = sampler::make_schedule(o.train_steps, o.beta_start, o.beta_end);
    Tensor4 init = read_tensor(o.init);
    Tensor4 z = sampler::sample_temporal(make_predictor(o.predictor, sched), init,
                                         make_condition(o), o.num_views, make_sample_options(o),
                                         sched);
    write_tensor(z, o.out);
    if (!o.decode_dir.empty()) decode_views(z, o.decode_dir);
}

// ---- metrics -------------------------------------------------------------------------

struct MetricsOpts {
    std::string ref_dir, cand_dir;         // pair mode
    std::string frames_dir, cameras_file;  // warp mode
    std::string out;
};

int count_frames(const fs::path& dir) {
    int n = 0;
    while (fs::exists(frame_path(dir, n))) ++n;
    return n;
}

void emit_report(const std::string& text, const std::string& out_path) {
    std::cout << text;
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        out << text;
        if (!out) throw IoError("failed writing " + out_path);
    }
}

void run_metrics(const MetricsOpts& o) {
    const bool pair_mode = !o.ref_dir.empty() || !o.cand_dir.empty();
    const bool warp_mode = !o.frames_dir.empty() || !o.cameras_file.empty();
    if (pair_mode == warp_mode)
        throw UsageError("choose one mode: --ref/--cand for image pairs, --frames/--cameras for warp consistency");

    std::string report = "satground-metrics v1\n";
    if (pair_mode) {
        if (o.ref_dir.empty() || o.cand_dir.empty())
            throw UsageError("pair mode needs both --ref and --cand");
        int n_ref = count_frames(o.ref_dir), n_cand = count_frames(o.cand_dir);
        if (n_ref == 0) throw ValidationError("no frame_NNNN.ppm files in " + o.ref_dir);
        if (n_ref != n_cand)
            throw ValidationError("frame counts differ: " + std::to_string(n_ref) + " vs " +
                                  std::to_string(n_cand));
        report += "mode pair\nframes " + std::to_string(n_ref) + "\n";
        double sum_psnr = 0, sum_ssim = 0;
        for (int i = 0; i < n_ref; ++i) {
            Image a = read_ppm(frame_path(o.ref_dir, i));
            Image b = read_ppm(frame_path(o.cand_dir, i));
            double p = metrics::psnr(a, b);
            double s = metrics::ssim(a, b);
            sum_psnr += p;
            sum_ssim += s;
            report += "frame " + std::to_string(i) + " psnr " + fmt_double(p) + " ssim " +
                      fmt_double(s) + "\n";
        }
        report += "mean_psnr " + fmt_double(sum_psnr / n_ref) + "\n";
        report += "mean_ssim " + fmt_double(sum_ssim / n_ref) + "\n";
    } else {
        if (o.frames_dir.empty() || o.cameras_file.empty())
            throw UsageError("warp mode needs both --frames and --cameras");
        auto records = read_cameras(o.cameras_file);
        std::vector<Image> frames, depths;
        std::vector<render::GroundCamera> cams;
        for (const auto& rec : records) {
            if (!rec.fov_deg) continue;
            frames.push_back(read_ppm(frame_path(o.frames_dir, rec.id)));
            depths.push_back(read_pfm(depth_path(o.frames_dir, rec.id)));
            cams.push_back(to_ground_camera(rec));
        }
        auto eval = metrics::warp_consistency(frames, depths, cams);
        report += "mode warp\npairs " + std::to_string(eval.per_frame.size()) + "\n";
        for (std::size_t i = 0; i < eval.per_frame.size(); ++i)
            report += "pair " + std::to_string(i) + " psnr " + fmt_double(eval.per_frame[i]) +
                      " coverage " + fmt_double(eval.coverage[i]) + "\n";
        report += "aggregate " + fmt_double(eval.aggregate) + "\n";
    }
    emit_report(report, o.out);
}

// ---- dataset ----------------------------------------------------------------------------

struct DatasetOpts {
    std::string manifest, out, base_dir;
    std::vector<double> extent;
    std::vector<double> origin{0.0, 0.0};
    double tile_size = 600.0;
    int train = 70, test = 20;
    std::uint64_t seed = 0;
    int length = 5;
    double min_gap = 3.0, max_gap = 10.0;
};

void run_dataset_tile(const DatasetOpts& o) {
    if (o.extent.size() != 4) throw UsageError("--extent expects min_x,min_y,max_x,max_y");
    dataset::DatasetManifest m;
    m.origin_lon = o.origin[0];
    m.origin_lat = o.origin[1];
    m.extent = {o.extent[0], o.extent[1], o.extent[2], o.extent[3]};
    m.tile_size_m = o.tile_size;
    m.tiles = dataset::tile_extent(m.extent, m.tile_size_m);
    dataset::write_manifest(m, o.out);
    std::cout << "tiles " << m.tiles.size() << "\n";
}

void run_dataset_split(const DatasetOpts& o) {
    auto m = dataset::read_manifest(o.manifest);
    dataset::split_tiles(m.tiles, o.train, o.test, o.seed);
    dataset::write_manifest(m, o.out);
    std::cout << "train " << o.train << "\ntest " << o.test << "\nunassigned "
              << (m.tiles.size() - o.train - o.test) << "\n";
}

void run_dataset_sequences(const DatasetOpts& o) {
    auto m = dataset::read_manifest(o.manifest);
    auto positions = dataset::record_positions(m);
    for (std::size_t i = 0; i < m.records.size(); ++i) {
        if (m.records[i].tile_row < 0 && m.records[i].tile_col < 0) {
            auto [row, col] = dataset::tile_index_for(m, positions[i][0], positions[i][1]);
            m.records[i].tile_row = row;
            m.records[i].tile_col = col;
        }
    }
    auto seqs = dataset::build_sequences(m.records, positions, o.length, o.min_gap, o.max_gap);
    m.sequences = dataset::drop_split_straddlers(seqs, m);
    dataset::write_manifest(m, o.out);
    std::cout << "sequences " << m.sequences.size() << "\n";
}

void run_dataset_validate(const DatasetOpts& o) {
    auto m = dataset::read_manifest(o.manifest);
    fs::path base = o.base_dir.empty() ? fs::path(o.manifest).parent_path() : fs::path(o.base_dir);
    auto result = dataset::validate_manifest(m, base);
    for (const auto& w : result.warnings) std::cout << "warning: " << w << "\n";
    if (!result.ok())
        throw ValidationError("manifest failed validation with " +
                              std::to_string(result.warnings.size()) + " warning(s)");
    std::cout << "ok\n";
}

std::string sanitize(std::string msg) {
    for (char& c : msg)
        if (c == '\n' || c == '\r') c = ' ';
    std::string out;
    for (char c : msg) {
        if (c == '"') out += '\'';
        else out += c;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"satellite-to-ground synthesis pipeline"};
    app.set_version_flag("--version", "satground 0.1.0");
    app.set_config("--config", "", "key=value config file; flags override it")
        ->envname("SATGROUND_CONFIG");
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker thread cap (0 = hardware concurrency)");
    bool print_config = false;
    app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

    std::function<void()> selected;

    // resample-pano
    ResampleOpts ro;
    auto* resample = app.add_subcommand("resample-pano", "perspective views out of a panorama");
    resample->add_option("--pano", ro.pano, "equirectangular panorama (.ppm/.pfm)")->required();
    resample->add_option("--out-dir", ro.out_dir, "output directory")->required();
    resample->add_option("--heading", ro.heading, "world azimuth of the panorama's left edge");
    resample->add_option("--frame", ro.frame, "angle frame: pano | world")
        ->check(CLI::IsMember({"pano", "world"}));
    resample->add_option("--name", ro.name, "emit one custom view with this name instead of LF/LR/RF/RR");
    resample->add_option("--theta", ro.theta, "custom view azimuth (deg)");
    resample->add_option("--phi", ro.phi, "view altitude (deg)");
    resample->add_option("--fov", ro.fov, "horizontal field of view (deg)");
    resample->add_option("--width", ro.width, "view width (px)");
    resample->add_option("--height", ro.height, "view height (px)");
    resample->callback([&] { selected = [&] { run_resample(ro); }; });

    // fuse
    FuseOpts fo;
    auto* fuse = app.add_subcommand("fuse", "fuse per-view depth maps into a point cloud");
    fuse->add_option("--cameras", fo.cameras, "satellite camera file")->required();
    fuse->add_option("--depth-dir", fo.depth_dir, "directory of depth_NNNN.pfm keyed by camera id")
        ->required();
    fuse->add_option("--out", fo.out, "output .ply")->required();
    fuse->add_option("--voxel", fo.voxel, "fusion voxel edge (m)");
    fuse->add_option("--refine", fo.refine, "refinement stage: none | outlier");
    fuse->add_option("--knn", fo.knn, "outlier removal neighbor count");
    fuse->add_option("--std-mult", fo.std_mult, "outlier removal stddev multiplier");
    fuse->callback([&] { selected = [&] { run_fuse(fo); }; });

    // mesh
    MeshOpts mo;
    auto* mesh = app.add_subcommand("mesh", "triangulate one view's depth map");
    mesh->add_option("--cameras", mo.cameras, "satellite camera file")->required();
    mesh->add_option("--depth-dir", mo.depth_dir, "directory of depth_NNNN.pfm")->required();
    mesh->add_option("--out", mo.out, "output mesh")->required();
    mesh->add_option("--camera-id", mo.camera_id, "camera id to mesh (default: the only one)");
    mesh->add_option("--max-edge", mo.max_edge, "maximum triangle edge length (m)");
    mesh->add_option("--max-ratio", mo.max_ratio, "maximum adjacent depth ratio");
    mesh->callback([&] { selected = [&] { run_mesh(mo); }; });

    // texture
    TextureOpts to;
    auto* texture = app.add_subcommand("texture", "project satellite images onto a mesh");
    texture->add_option("--mesh", to.mesh, "input mesh")->required();
    texture->add_option("--cameras", to.cameras, "satellite camera file with image= entries")
        ->required();
    texture->add_option("--out", to.out, "output textured mesh")->required();
    texture->callback([&] { selected = [&] { run_texture(to); }; });

    // render
    RenderOpts rdo;
    auto* rnd = app.add_subcommand("render", "rasterize the mesh at ground cameras");
    rnd->add_option("--mesh", rdo.mesh, "textured mesh")->required();
    rnd->add_option("--out-dir", rdo.out_dir, "output directory")->required();
    rnd->add_option("--cameras", rdo.cameras, "ground camera file (fov form); overrides trajectory flags");
    rnd->add_option("--start", rdo.start, "trajectory start x,y,z (m)")->delimiter(',')->expected(3);
    rnd->add_option("--heading", rdo.heading, "trajectory azimuth (deg)");
    rnd->add_option("--pitch", rdo.pitch, "camera pitch (deg)");
    rnd->add_option("--step", rdo.step, "spacing between cameras (m)");
    rnd->add_option("--count", rdo.count, "number of cameras");
    rnd->add_option("--fov", rdo.fov, "horizontal field of view (deg)");
    rnd->add_option("--width", rdo.width, "frame width (px)");
    rnd->add_option("--height", rdo.height, "frame height (px)");
    rnd->add_option("--near", rdo.near, "near plane (m)");
    rnd->add_option("--far", rdo.far, "far plane (m)");
    rnd->callback([&] { selected = [&] { run_render(rdo); }; });

    // sample / sample-temporal
    SampleOpts so;
    auto add_sampling_flags = [&](CLI::App* cmd) {
        cmd->add_option("--steps", so.steps, "denoising steps");
        cmd->add_option("--cfg-scale", so.cfg_scale, "classifier-free guidance scale");
        cmd->add_option("--seed", so.seed, "noise seed");
        cmd->add_option("--train-steps", so.train_steps, "schedule length");
        cmd->add_option("--beta-start", so.beta_start, "schedule beta at t=0");
        cmd->add_option("--beta-end", so.beta_end, "schedule beta at t=T-1");
        cmd->add_option("--predictor", so.predictor,
                        "noise predictor: zero | oracle:<mu>,<sigma> | file:<path>");
        cmd->add_option("--sat-features", so.sat_features, "condition tensor (.sgtn)");
        cmd->add_option("--motion-features", so.motion_features, "condition tensor (.sgtn)");
        cmd->add_option("--null-mode", so.null_mode, "CFG null branch drops: both | sat | temporal");
        cmd->add_option("--out", so.out, "output latent (.sgtn)")->required();
        cmd->add_option("--decode-dir", so.decode_dir, "also decode per-view images here");
    };
    auto* sample = app.add_subcommand("sample", "satellite-guided latent sampling");
    sample->add_option("--shape", so.shape, "latent shape v,c,h,w")->delimiter(',')->expected(4);
    add_sampling_flags(sample);
    sample->callback([&] { selected = [&] { run_sample(so); }; });

    auto* sample_t = app.add_subcommand("sample-temporal", "temporally conditioned latent sampling");
    sample_t->add_option("--init", so.init, "init latent slice (.sgtn, shape 1,c,h,w)")->required();
    sample_t->add_option("--num-views", so.num_views, "views to generate");
    add_sampling_flags(sample_t);
    sample_t->callback([&] { selected = [&] { run_sample_temporal(so); }; });

    // metrics
    MetricsOpts mco;
    auto* met = app.add_subcommand("metrics", "psnr/ssim pairs or warp consistency");
    met->add_option("--ref", mco.ref_dir, "reference frame directory (pair mode)");
    met->add_option("--cand", mco.cand_dir, "candidate frame directory (pair mode)");
    met->add_option("--frames", mco.frames_dir, "frame+depth directory (warp mode)");
    met->add_option("--cameras", mco.cameras_file, "ground camera file (warp mode)");
    met->add_option("--out", mco.out, "also write the report here");
    met->callback([&] { selected = [&] { run_metrics(mco); }; });

    // dataset
    DatasetOpts dso;
    auto* ds = app.add_subcommand("dataset", "tiling, splits, sequences, validation");
    ds->require_subcommand(1);
    auto* ds_tile = ds->add_subcommand("tile", "partition an extent into tiles");
    ds_tile->add_option("--extent", dso.extent, "min_x,min_y,max_x,max_y (m)")
        ->delimiter(',')
        ->expected(4)
        ->required();
    ds_tile->add_option("--origin", dso.origin, "projection origin lon,lat")->delimiter(',')->expected(2);
    ds_tile->add_option("--tile-size", dso.tile_size, "tile edge (m)");
    ds_tile->add_option("--out", dso.out, "output manifest")->required();
    ds_tile->callback([&] { selected = [&] { run_dataset_tile(dso); }; });

    auto* ds_split = ds->add_subcommand("split", "assign tiles to train/test");
    ds_split->add_option("--manifest", dso.manifest, "input manifest")->required();
    ds_split->add_option("--out", dso.out, "output manifest")->required();
    ds_split->add_option("--train", dso.train, "train tile count");
    ds_split->add_option("--test", dso.test, "test tile count");
    ds_split->add_option("--seed", dso.seed, "shuffle seed");
    ds_split->callback([&] { selected = [&] { run_dataset_split(dso); }; });

    auto* ds_seq = ds->add_subcommand("sequences", "chain records into sequences");
    ds_seq->add_option("--manifest", dso.manifest, "input manifest")->required();
    ds_seq->add_option("--out", dso.out, "output manifest")->required();
    ds_seq->add_option("--length", dso.length, "records per sequence");
    ds_seq->add_option("--min-gap", dso.min_gap, "minimum spacing (m)");
    ds_seq->add_option("--max-gap", dso.max_gap, "maximum spacing (m)");
    ds_seq->callback([&] { selected = [&] { run_dataset_sequences(dso); }; });

    auto* ds_val = ds->add_subcommand("validate", "semantic manifest checks");
    ds_val->add_option("--manifest", dso.manifest, "manifest to validate")->required();
    ds_val->add_option("--base-dir", dso.base_dir, "base for referenced paths (default: manifest dir)");
    ds_val->callback([&] { selected = [&] { run_dataset_validate(dso); }; });

    try {
        app.parse(argc, argv);
        set_max_jobs(jobs);
        if (print_config) {
            std::cout << app.config_to_str(true, true);
            return 0;
        }
        if (!selected) throw UsageError("a subcommand is required (see --help)");
        selected();
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::cerr << "error class=usage message=\"" << sanitize(e.what()) << "\"\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error class=" << error_class_name(e.error_class()) << " message=\""
                  << sanitize(e.what()) << "\"\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error class=contract message=\"" << sanitize(e.what()) << "\"\n";
        return 4;
    }
}

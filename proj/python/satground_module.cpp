// Python bindings for the main pipeline operations. Arrays cross the boundary
// as numpy buffers; shapes follow the C++ conventions (tensors are
// (views, channels, h, w) float64, images are (h, w, c) float32).

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>

#include "satground/dataset.hpp"
#include "satground/errors.hpp"
#include "satground/geometry.hpp"
#include "satground/image.hpp"
#include "satground/metrics.hpp"
#include "satground/renderer.hpp"
#include "satground/sampler.hpp"
#include "satground/spherical.hpp"
#include "satground/tensor.hpp"

namespace py = pybind11;
using namespace satground;

namespace {

Tensor4 tensor_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 4) throw ContractError("expected a 4-d (views, channels, h, w) array");
    Tensor4 t(int(a.shape(0)), int(a.shape(1)), int(a.shape(2)), int(a.shape(3)));
    std::copy_n(a.data(), t.data.size(), t.data.begin());
    return t;
}

py::array_t<double> array_from_tensor(const Tensor4& t) {
    py::array_t<double> a({t.views, t.channels, t.height, t.width});
    std::copy_n(t.data.begin(), t.data.size(), a.mutable_data());
    return a;
}

Image image_from_array(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2 && a.ndim() != 3) throw ContractError("expected an (h, w) or (h, w, c) array");
    int c = a.ndim() == 3 ? int(a.shape(2)) : 1;
    Image img(int(a.shape(1)), int(a.shape(0)), c);
    std::copy_n(a.data(), img.data.size(), img.data.begin());
    return img;
}

py::array_t<float> array_from_image(const Image& img) {
    py::array_t<float> a;
    if (img.channels == 1)
        a = py::array_t<float>({img.height, img.width});
    else
        a = py::array_t<float>({img.height, img.width, img.channels});
    std::copy_n(img.data.begin(), img.data.size(), a.mutable_data());
    return a;
}

// Python predictors receive (latent, timestep, is_null) and return an array
// of the noise-block shape.
sampler::NoisePredictor wrap_predictor(const py::function& fn) {
    return [fn](const Tensor4& z, int t, const sampler::ConditionBundle& cond) {
        py::object out = fn(array_from_tensor(z), t, cond.null_condition);
        return tensor_from_array(out.cast<py::array_t<double, py::array::c_style | py::array::forcecast>>());
    };
}

RigidTransform pose_from_arrays(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& rot,
    const py::array_t<double, py::array::c_style | py::array::forcecast>& trans) {
    if (rot.ndim() != 2 || rot.shape(0) != 3 || rot.shape(1) != 3)
        throw ContractError("rotation must be a 3x3 array");
    if (trans.ndim() != 1 || trans.shape(0) != 3) throw ContractError("translation must have 3 entries");
    RigidTransform pose;
    std::copy_n(rot.data(), 9, pose.rotation.m.begin());
    pose.translation = {trans.at(0), trans.at(1), trans.at(2)};
    return pose;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "satellite-to-ground synthesis pipeline core";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    // --- spherical -----------------------------------------------------------
    m.def(
        "resample_perspective",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& pano,
           double heading, double theta, double phi, double fov, int width, int height) {
            spherical::Panorama p(image_from_array(pano), heading);
            spherical::PerspectiveSpec spec;
            spec.theta_deg = theta;
            spec.phi_deg = phi;
            spec.fov_deg = fov;
            spec.width_px = width;
            spec.height_px = height;
            return array_from_image(spherical::resample_perspective(p, spec));
        },
        py::arg("pano"), py::arg("heading") = 0.0, py::arg("theta") = 0.0, py::arg("phi") = 0.0,
        py::arg("fov") = 75.0, py::arg("width") = 256, py::arg("height") = 256,
        "Resample a perspective view out of an equirectangular panorama.");

    m.def(
        "pano_to_angles",
        [](double u, double v, int width, int height) {
            spherical::Panorama p(Image::rgb(width, height));
            return spherical::pano_pixel_to_angles(u, v, p);
        },
        py::arg("u"), py::arg("v"), py::arg("width"), py::arg("height"));
    m.def(
        "angles_to_pano",
        [](double theta, double phi, int width, int height) {
            spherical::Panorama p(Image::rgb(width, height));
            return spherical::angles_to_pano_pixel(theta, phi, p);
        },
        py::arg("theta"), py::arg("phi"), py::arg("width"), py::arg("height"));

    // --- sampler ---------------------------------------------------------------
    py::class_<sampler::NoiseSchedule>(m, "NoiseSchedule")
        .def_readonly("num_train_steps", &sampler::NoiseSchedule::num_train_steps)
        .def_readonly("betas", &sampler::NoiseSchedule::betas)
        .def_readonly("alpha_bars", &sampler::NoiseSchedule::alpha_bars)
        .def("alpha_bar", &sampler::NoiseSchedule::alpha_bar, py::arg("t"));

    m.def("make_schedule", &sampler::make_schedule, py::arg("num_train_steps") = 1000,
          py::arg("beta_start") = 1e-4, py::arg("beta_end") = 0.02);
    m.def("inference_timesteps", &sampler::inference_timesteps, py::arg("num_train_steps"),
          py::arg("num_steps"));

    m.def(
        "add_noise",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& z0, int t,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& eps,
           const sampler::NoiseSchedule& sched) {
            return array_from_tensor(sampler::add_noise(tensor_from_array(z0), t,
                                                        tensor_from_array(eps), sched));
        },
        py::arg("z0"), py::arg("t"), py::arg("eps"), py::arg("schedule"));

    m.def(
        "ddim_step",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& z_t,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& eps_hat, int t,
           int t_prev, const sampler::NoiseSchedule& sched) {
            return array_from_tensor(sampler::ddim_step(tensor_from_array(z_t),
                                                        tensor_from_array(eps_hat), t, t_prev,
                                                        sched));
        },
        py::arg("z_t"), py::arg("eps_hat"), py::arg("t"), py::arg("t_prev"), py::arg("schedule"));

    m.def(
        "cfg_combine",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& c, double scale) {
            return array_from_tensor(
                sampler::cfg_combine(tensor_from_array(u), tensor_from_array(c), scale));
        },
        py::arg("eps_uncond"), py::arg("eps_cond"), py::arg("scale"));

    m.def(
        "sample_guided",
        [](const py::function& predictor, const sampler::NoiseSchedule& sched, int views,
           int channels, int height, int width, int num_steps, double cfg_scale,
           std::uint64_t seed) {
            sampler::SampleOptions opts;
            opts.num_steps = num_steps;
            opts.cfg_scale = cfg_scale;
            opts.seed = seed;
            sampler::LatentShape shape{views, channels, height, width};
            return array_from_tensor(sampler::sample_guided(wrap_predictor(predictor), {}, shape,
                                                            opts, sched));
        },
        py::arg("predictor"), py::arg("schedule"), py::arg("views") = 1, py::arg("channels") = 4,
        py::arg("height") = 32, py::arg("width") = 32, py::arg("num_steps") = 20,
        py::arg("cfg_scale") = 1.0, py::arg("seed") = 0,
        "DDIM sampling; predictor is a callable (latent, t, is_null) -> noise array.");

    m.def(
        "sample_temporal",
        [](const py::function& predictor,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& init,
           const sampler::NoiseSchedule& sched, int num_views, int num_steps, double cfg_scale,
           std::uint64_t seed) {
            sampler::SampleOptions opts;
            opts.num_steps = num_steps;
            opts.cfg_scale = cfg_scale;
            opts.seed = seed;
            return array_from_tensor(sampler::sample_temporal(
                wrap_predictor(predictor), tensor_from_array(init), {}, num_views, opts, sched));
        },
        py::arg("predictor"), py::arg("init"), py::arg("schedule"), py::arg("num_views") = 5,
        py::arg("num_steps") = 20, py::arg("cfg_scale") = 1.0, py::arg("seed") = 0);

    // --- metrics ---------------------------------------------------------------
    m.def(
        "psnr",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& a,
           const py::array_t<float, py::array::c_style | py::array::forcecast>& b) {
            return metrics::psnr(image_from_array(a), image_from_array(b));
        },
        py::arg("reference"), py::arg("candidate"));
    m.def(
        "ssim",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& a,
           const py::array_t<float, py::array::c_style | py::array::forcecast>& b) {
            return metrics::ssim(image_from_array(a), image_from_array(b));
        },
        py::arg("reference"), py::arg("candidate"));

    // --- renderer ----------------------------------------------------------------
    m.def(
        "rasterize",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& vertices,
           const py::array_t<int, py::array::c_style | py::array::forcecast>& faces,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& rotation,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& translation,
           double fov, int width, int height, double near, double far, const py::object& uvs,
           const py::object& atlas) {
            if (vertices.ndim() != 2 || vertices.shape(1) != 3)
                throw ContractError("vertices must be (n, 3)");
            if (faces.ndim() != 2 || faces.shape(1) != 3) throw ContractError("faces must be (m, 3)");
            geom::TriangleMesh mesh;
            for (py::ssize_t i = 0; i < vertices.shape(0); ++i)
                mesh.vertices.push_back({vertices.at(i, 0), vertices.at(i, 1), vertices.at(i, 2)});
            for (py::ssize_t i = 0; i < faces.shape(0); ++i)
                mesh.faces.push_back({faces.at(i, 0), faces.at(i, 1), faces.at(i, 2)});
            if (!uvs.is_none()) {
                auto u = uvs.cast<py::array_t<double, py::array::c_style | py::array::forcecast>>();
                if (u.ndim() != 3 || u.shape(0) != faces.shape(0) || u.shape(1) != 3 || u.shape(2) != 2)
                    throw ContractError("uvs must be (m, 3, 2)");
                for (py::ssize_t i = 0; i < u.shape(0); ++i)
                    mesh.face_uvs.push_back({{{u.at(i, 0, 0), u.at(i, 0, 1)},
                                              {u.at(i, 1, 0), u.at(i, 1, 1)},
                                              {u.at(i, 2, 0), u.at(i, 2, 1)}}});
                if (atlas.is_none())
                    throw ContractError("textured rasterization needs an atlas image");
                mesh.atlas = image_from_array(
                    atlas.cast<py::array_t<float, py::array::c_style | py::array::forcecast>>());
            }
            render::GroundCamera cam;
            cam.pose = pose_from_arrays(rotation, translation);
            cam.fov_deg = fov;
            cam.width_px = width;
            cam.height_px = height;
            cam.near_m = near;
            cam.far_m = far;
            render::Framebuffer fb = render::rasterize(mesh, cam);
            return py::make_tuple(array_from_image(fb.color), array_from_image(fb.depth));
        },
        py::arg("vertices"), py::arg("faces"), py::arg("rotation"), py::arg("translation"),
        py::arg("fov") = 75.0, py::arg("width") = 256, py::arg("height") = 256,
        py::arg("near") = 0.1, py::arg("far") = 1000.0, py::arg("uvs") = py::none(),
        py::arg("atlas") = py::none(),
        "Z-buffered rasterization; returns (color (h,w,3) float32, depth (h,w) float32).");

    // --- dataset ------------------------------------------------------------------
    m.def(
        "tile_extent",
        [](double min_x, double min_y, double max_x, double max_y, double tile_size) {
            auto tiles = dataset::tile_extent({min_x, min_y, max_x, max_y}, tile_size);
            py::list out;
            for (const auto& t : tiles)
                out.append(py::make_tuple(t.row, t.col,
                                          py::make_tuple(t.bounds.min_x, t.bounds.min_y,
                                                         t.bounds.max_x, t.bounds.max_y)));
            return out;
        },
        py::arg("min_x"), py::arg("min_y"), py::arg("max_x"), py::arg("max_y"),
        py::arg("tile_size") = 600.0);

    m.def(
        "split_assignments",
        [](int num_tiles, int train, int test, std::uint64_t seed) {
            std::vector<dataset::Tile> tiles(num_tiles);
            dataset::split_tiles(tiles, train, test, seed);
            std::vector<std::string> out;
            out.reserve(tiles.size());
            for (const auto& t : tiles) out.emplace_back(dataset::split_name(t.split));
            return out;
        },
        py::arg("num_tiles"), py::arg("train") = 70, py::arg("test") = 20, py::arg("seed") = 0,
        "Per-tile split labels from the seeded shuffle.");
}

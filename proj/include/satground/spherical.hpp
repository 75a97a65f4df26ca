#pragma once

#include <utility>

#include "satground/image.hpp"
#include "satground/math3d.hpp"

namespace satground::spherical {

// Equirectangular panorama (width = 2 x height). Columns parameterize the
// azimuth theta measured from the left image edge increasing rightward, rows
// the altitude phi with +90 at the top edge. heading_deg stores the world
// azimuth of the theta=0 column; the projection operations below work in the
// panorama frame and never apply it.
struct Panorama {
    Image image;
    double heading_deg = 0.0;

    Panorama() = default;
    explicit Panorama(Image img, double heading = 0.0);

    int width() const { return image.width; }
    int height() const { return image.height; }
};

struct PerspectiveSpec {
    double theta_deg = 0.0;  // azimuth of the view center
    double phi_deg = 0.0;    // altitude of the view center
    double fov_deg = 75.0;   // horizontal field of view
    int height_px = 256;
    int width_px = 256;

    void validate() const;
    double focal_px() const { return (width_px / 2.0) / std::tan(deg2rad(fov_deg) / 2.0); }
};

// Pixel centers sit at index + 0.5 throughout this module.

// (u, v) in [0, W) x [0, H) -> (theta, phi) in degrees. Out-of-range pixels
// raise a contract error.
std::pair<double, double> pano_pixel_to_angles(double u, double v, const Panorama& pano);

// Exact algebraic inverse; theta wraps modulo 360, phi must lie in [-90, 90].
std::pair<double, double> angles_to_pano_pixel(double theta_deg, double phi_deg, const Panorama& pano);

// Unit world-frame direction through pixel (i, j): the local camera ray
// normalize((i + 0.5 - W/2, -(j + 0.5 - H/2), f)) rotated by yaw(theta) then
// pitch(phi).
Vec3 perspective_ray(double i, double j, const PerspectiveSpec& spec);

// Bilinear sample of an image at continuous pixel coordinates (u, v) with the
// column axis wrapping and the row axis clamping. Exposed for reuse by the
// warp-based metrics.
void sample_bilinear_wrap(const Image& img, double u, double v, float* out);
void sample_bilinear_clamp(const Image& img, double u, double v, float* out);

// Resamples a perspective view out of the panorama: every output pixel is a
// bilinear sample at the panorama position of its viewing ray. theta wraps
// around the seam, phi clamps at the poles.
Image resample_perspective(const Panorama& pano, const PerspectiveSpec& spec);

}  // namespace satground::spherical

#include "satground/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "satground/errors.hpp"
#include "satground/parallel.hpp"

namespace satground::spherical {

Panorama::Panorama(Image img, double heading) : image(std::move(img)), heading_deg(heading) {
    if (image.channels != 3) throw ContractError("panorama must be a 3-channel image");
    if (image.width != 2 * image.height)
        throw ContractError("panorama must be equirectangular (width = 2 x height), got " +
                            std::to_string(image.width) + "x" + std::to_string(image.height));
    if (heading_deg < 0.0 || heading_deg >= 360.0)
        throw ContractError("panorama heading must lie in [0, 360)");
}

void PerspectiveSpec::validate() const {
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw UsageError("fov_deg must lie strictly in (0, 180)");
    if (height_px < 1 || width_px < 1) throw UsageError("perspective dimensions must be >= 1");
    if (phi_deg < -90.0 || phi_deg > 90.0) throw UsageError("phi_deg must lie in [-90, 90]");
}

std::pair<double, double> pano_pixel_to_angles(double u, double v, const Panorama& pano) {
    const int w = pano.width(), h = pano.height();
    if (!(u >= 0.0 && u < w && v >= 0.0 && v < h)) {
        std::ostringstream os;
        os << "panorama pixel (" << u << ", " << v << ") outside [0," << w << ") x [0," << h << ")";
        throw ContractError(os.str());
    }
    double theta = (u + 0.5) / w * 360.0;
    double phi = 90.0 - (v + 0.5) / h * 180.0;
    return {theta, phi};
}

std::pair<double, double> angles_to_pano_pixel(double theta_deg, double phi_deg, const Panorama& pano) {
    if (phi_deg < -90.0 || phi_deg > 90.0) throw ContractError("phi_deg must lie in [-90, 90]");
    double theta = wrap_deg(theta_deg);
    double u = theta / 360.0 * pano.width() - 0.5;
    double v = (90.0 - phi_deg) / 180.0 * pano.height() - 0.5;
    return {u, v};
}

Vec3 perspective_ray(double i, double j, const PerspectiveSpec& spec) {
    spec.validate();
    if (!(i >= 0.0 && i < spec.width_px && j >= 0.0 && j < spec.height_px)) {
        std::ostringstream os;
        os << "perspective pixel (" << i << ", " << j << ") outside [0," << spec.width_px << ") x [0,"
           << spec.height_px << ")";
        throw ContractError(os.str());
    }
    Vec3 local{i + 0.5 - spec.width_px / 2.0, -(j + 0.5 - spec.height_px / 2.0), spec.focal_px()};
    return (view_rotation(spec.theta_deg, spec.phi_deg) * local).normalized();
}

namespace {

// Continuous pixel coordinate -> left sample index and fraction for a
// pixel-center-at-0.5 grid.
inline void split_coord(double coord, int& i0, double& frac) {
    double x = coord - 0.5;
    double fl = std::floor(x);
    i0 = int(fl);
    frac = x - fl;
}

}  // namespace

void sample_bilinear_wrap(const Image& img, double u, double v, float* out) {
    int x0, y0;
    double fx, fy;
    split_coord(u, x0, fx);
    split_coord(v, y0, fy);
    const int w = img.width, h = img.height;
    int xa = ((x0 % w) + w) % w;
    int xb = (xa + 1) % w;
    int ya = std::clamp(y0, 0, h - 1);
    int yb = std::clamp(y0 + 1, 0, h - 1);
    for (int c = 0; c < img.channels; ++c) {
        double top = (1.0 - fx) * img.at(xa, ya, c) + fx * img.at(xb, ya, c);
        double bot = (1.0 - fx) * img.at(xa, yb, c) + fx * img.at(xb, yb, c);
        out[c] = float((1.0 - fy) * top + fy * bot);
    }
}

void sample_bilinear_clamp(const Image& img, double u, double v, float* out) {
    int x0, y0;
    double fx, fy;
    split_coord(u, x0, fx);
    split_coord(v, y0, fy);
    const int w = img.width, h = img.height;
    int xa = std::clamp(x0, 0, w - 1);
    int xb = std::clamp(x0 + 1, 0, w - 1);
    int ya = std::clamp(y0, 0, h - 1);
    int yb = std::clamp(y0 + 1, 0, h - 1);
    for (int c = 0; c < img.channels; ++c) {
        double top = (1.0 - fx) * img.at(xa, ya, c) + fx * img.at(xb, ya, c);
        double bot = (1.0 - fx) * img.at(xa, yb, c) + fx * img.at(xb, yb, c);
        out[c] = float((1.0 - fy) * top + fy * bot);
    }
}

Image resample_perspective(const Panorama& pano, const PerspectiveSpec& spec) {
    spec.validate();
    if (pano.image.empty()) throw ContractError("cannot resample an empty panorama");
    Image out(spec.width_px, spec.height_px, 3);
    const Mat3 rot = view_rotation(spec.theta_deg, spec.phi_deg);
    const double f = spec.focal_px();
    parallel_for(0, spec.height_px, [&](int j0, int j1) {
        for (int j = j0; j < j1; ++j) {
            for (int i = 0; i < spec.width_px; ++i) {
                Vec3 local{i + 0.5 - spec.width_px / 2.0, -(j + 0.5 - spec.height_px / 2.0), f};
                Vec3 dir = rot * local;
                double theta, phi;
                angles_from_direction(dir, theta, phi);
                // continuous sample position: pixel index i has its center at i + 0.5
                double u = theta / 360.0 * pano.width();
                double v = (90.0 - phi) / 180.0 * pano.height();
                sample_bilinear_wrap(pano.image, u, v, &out.at(i, j, 0));
            }
        }
    });
    return out;
}

}  // namespace satground::spherical

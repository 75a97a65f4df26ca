#include "satground/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "satground/errors.hpp"
#include "satground/parallel.hpp"
#include "satground/spherical.hpp"

namespace satground::metrics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mse_to_db(double mse) { return mse == 0.0 ? kInf : 10.0 * std::log10(1.0 / mse); }

}  // namespace

double psnr(const Image& reference, const Image& candidate) {
    if (!reference.same_shape(candidate))
        throw ContractError("psnr requires equally shaped images");
    if (reference.empty()) throw ContractError("psnr requires non-empty images");
    double acc = 0.0;
    for (std::size_t i = 0; i < reference.data.size(); ++i) {
        double d = double(reference.data[i]) - double(candidate.data[i]);
        acc += d * d;
    }
    return mse_to_db(acc / double(reference.data.size()));
}

double ssim(const Image& reference, const Image& candidate) {
    if (!reference.same_shape(candidate))
        throw ContractError("ssim requires equally shaped images");
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01;  // (K1 L)^2, L = 1
    constexpr double kC2 = 0.03 * 0.03;
    if (reference.width < kWin || reference.height < kWin)
        throw UsageError("ssim requires images of at least 11x11");

    std::array<double, kWin * kWin> w{};
    {
        double sum = 0.0;
        for (int y = 0; y < kWin; ++y)
            for (int x = 0; x < kWin; ++x) {
                double dx = x - kWin / 2, dy = y - kWin / 2;
                w[y * kWin + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
                sum += w[y * kWin + x];
            }
        for (double& v : w) v /= sum;
    }

    const int rows = reference.height - kWin + 1;
    const int cols = reference.width - kWin + 1;
    const int channels = reference.channels;
    // Per-row partial sums keep the reduction independent of thread count.
    std::vector<double> row_sum(rows, 0.0);
    parallel_for(0, rows, [&](int r0, int r1) {
        for (int wy = r0; wy < r1; ++wy) {
            double acc = 0.0;
            for (int wx = 0; wx < cols; ++wx) {
                for (int c = 0; c < channels; ++c) {
                    double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
                    for (int y = 0; y < kWin; ++y)
                        for (int x = 0; x < kWin; ++x) {
                            double wgt = w[y * kWin + x];
                            double a = reference.at(wx + x, wy + y, c);
                            double b = candidate.at(wx + x, wy + y, c);
                            mx += wgt * a;
                            my += wgt * b;
                            mxx += wgt * a * a;
                            myy += wgt * b * b;
                            mxy += wgt * a * b;
                        }
                    double vx = mxx - mx * mx;
                    double vy = myy - my * my;
                    double cov = mxy - mx * my;
                    acc += ((2.0 * mx * my + kC1) * (2.0 * cov + kC2)) /
                           ((mx * mx + my * my + kC1) * (vx + vy + kC2));
                }
            }
            row_sum[wy] = acc;
        }
    });
    double total = 0.0;
    for (double v : row_sum) total += v;
    return total / (double(rows) * cols * channels);
}

SequenceEval warp_consistency(const std::vector<Image>& frames, const std::vector<Image>& depths,
                              const std::vector<render::GroundCamera>& cameras) {
    if (frames.size() != depths.size() || frames.size() != cameras.size())
        throw ContractError("warp_consistency requires equal frame/depth/camera counts");
    if (frames.size() < 2) throw UsageError("warp_consistency requires at least 2 frames");

    SequenceEval eval;
    eval.frame_count = int(frames.size());
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
        const Image& src = frames[i];
        const Image& dst = frames[i + 1];
        const Image& src_depth = depths[i];
        const Image& dst_depth = depths[i + 1];
        const render::GroundCamera& src_cam = cameras[i];
        const render::GroundCamera& dst_cam = cameras[i + 1];
        if (!src.same_shape(dst)) throw ContractError("warp_consistency frames differ in shape");

        const double f_dst = dst_cam.focal_px(), f_src = src_cam.focal_px();
        const double cx_dst = dst_cam.width_px / 2.0, cy_dst = dst_cam.height_px / 2.0;
        const double cx_src = src_cam.width_px / 2.0, cy_src = src_cam.height_px / 2.0;

        std::size_t mask_count = 0;
        double acc = 0.0;
        for (int y = 0; y < dst.height; ++y) {
            for (int x = 0; x < dst.width; ++x) {
                double d = dst_depth.at(x, y);
                if (!(d > 0.0) || !std::isfinite(d)) continue;
                // Back-project the target pixel, then look through the source camera.
                Vec3 p_cam{(x + 0.5 - cx_dst) * d / f_dst, -(y + 0.5 - cy_dst) * d / f_dst, d};
                Vec3 p_world = dst_cam.pose.apply_inverse(p_cam);
                Vec3 q = src_cam.pose.apply(p_world);
                if (!(q.z > 0.0)) continue;
                double px = f_src * q.x / q.z + cx_src;
                double py = -f_src * q.y / q.z + cy_src;
                if (px < 0.5 || px > src.width - 0.5 || py < 0.5 || py > src.height - 0.5)
                    continue;
                double sd = src_depth.at(int(px), int(py));
                if (!std::isfinite(sd) || std::abs(q.z - sd) > 0.05 * sd) continue;

                float warped[4] = {0, 0, 0, 0};
                spherical::sample_bilinear_clamp(src, px, py, warped);
                for (int c = 0; c < dst.channels; ++c) {
                    double diff = double(warped[c]) - double(dst.at(x, y, c));
                    acc += diff * diff;
                }
                ++mask_count;
            }
        }
        double denom = double(dst.pixel_count());
        eval.coverage.push_back(mask_count / denom);
        // An empty mask carries no evidence of inconsistency; coverage exposes it.
        eval.per_frame.push_back(mask_count == 0
                                     ? kInf
                                     : mse_to_db(acc / (double(mask_count) * dst.channels)));
    }
    double sum = 0.0;
    for (double v : eval.per_frame) sum += v;
    eval.aggregate = sum / double(eval.per_frame.size());
    return eval;
}

}  // namespace satground::metrics

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "satground/errors.hpp"
#include "satground/geometry.hpp"
#include "satground/metrics.hpp"
#include "satground/renderer.hpp"
#include "satground/rng.hpp"

using namespace satground;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Image random_image(int w, int h, int c, std::uint64_t seed, float lo = 0.0f, float hi = 1.0f) {
    Image img(w, h, c);
    NormalRng rng(seed);
    for (auto& v : img.data) v = lo + float(rng.uniform()) * (hi - lo);
    return img;
}

// Straight-line reimplementation of mean SSIM for the cross-check: one
// Gaussian-weighted 11x11 window per interior position, no shared code with
// the library routine.
double ssim_reference(const Image& a, const Image& b) {
    const int win = 11;
    const double sigma = 1.5, c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    std::vector<double> w(win * win);
    double wsum = 0;
    for (int y = 0; y < win; ++y)
        for (int x = 0; x < win; ++x) {
            double dx = x - 5, dy = y - 5;
            w[y * win + x] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
            wsum += w[y * win + x];
        }
    for (double& v : w) v /= wsum;

    double total = 0;
    int count = 0;
    for (int c = 0; c < a.channels; ++c)
        for (int wy = 0; wy + win <= a.height; ++wy)
            for (int wx = 0; wx + win <= a.width; ++wx) {
                double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
                for (int y = 0; y < win; ++y)
                    for (int x = 0; x < win; ++x) {
                        double wt = w[y * win + x];
                        double p = a.at(wx + x, wy + y, c);
                        double q = b.at(wx + x, wy + y, c);
                        mx += wt * p;
                        my += wt * q;
                        mxx += wt * p * p;
                        myy += wt * q * q;
                        mxy += wt * p * q;
                    }
                double vx = mxx - mx * mx, vy = myy - my * my, cov = mxy - mx * my;
                total += ((2 * mx * my + c1) * (2 * cov + c2)) /
                         ((mx * mx + my * my + c1) * (vx + vy + c2));
                ++count;
            }
    return total / count;
}

}  // namespace

TEST_CASE("psnr of an image with itself is infinite") {
    Image img = random_image(32, 24, 3, 1);
    CHECK(metrics::psnr(img, img) == kInf);
}

TEST_CASE("psnr of a constant offset matches the closed form") {
    Image ref = random_image(64, 64, 3, 2, 0.0f, 0.5f);
    Image cand = ref;
    for (auto& v : cand.data) v += 16.0f / 255.0f;
    double got = metrics::psnr(ref, cand);
    double want = 20.0 * std::log10(255.0 / 16.0);
    CHECK(std::abs(got - want) < 0.01);
    CHECK(want == doctest::Approx(24.0484).epsilon(1e-4));
}

TEST_CASE("psnr agrees with a direct mse evaluation") {
    Image ref = random_image(48, 32, 3, 3);
    Image cand = random_image(48, 32, 3, 4);
    double mse = 0;
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        double d = double(ref.data[i]) - double(cand.data[i]);
        mse += d * d;
    }
    mse /= double(ref.data.size());
    CHECK(std::abs(metrics::psnr(ref, cand) - 10.0 * std::log10(1.0 / mse)) < 1e-9);
}

TEST_CASE("psnr is symmetric and strictly decreasing in noise amplitude") {
    Image ref = random_image(40, 40, 3, 5);
    Image noise = random_image(40, 40, 3, 6, -1.0f, 1.0f);
    CHECK(metrics::psnr(ref, noise) == metrics::psnr(noise, ref));

    double prev = kInf;
    for (int level = 1; level <= 5; ++level) {
        Image cand = ref;
        for (std::size_t i = 0; i < cand.data.size(); ++i)
            cand.data[i] += 0.02f * float(level) * noise.data[i];
        double val = metrics::psnr(ref, cand);
        CHECK(val < prev);
        prev = val;
    }

    CHECK_THROWS_AS(metrics::psnr(ref, Image(10, 10, 3)), ContractError);
}

TEST_CASE("ssim of an image with itself is one") {
    for (int i = 0; i < 20; ++i) {
        Image img = random_image(16 + (i % 3) * 5, 16 + (i % 2) * 7, 3, 100 + i);
        CHECK(std::abs(metrics::ssim(img, img) - 1.0) <= 1e-9);
    }
}

TEST_CASE("ssim of inverted structure is negative") {
    Image a(24, 24, 1);
    NormalRng rng(7);
    for (auto& v : a.data) v = rng.uniform() < 0.5 ? 0.0f : 1.0f;
    Image b = a;
    for (auto& v : b.data) v = 1.0f - v;
    CHECK(metrics::ssim(a, b) < 0.0);
}

TEST_CASE("ssim matches an independent sliding-window evaluation") {
    Image a(16, 16, 1);
    Image b(16, 16, 1);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            a.at(x, y) = float(x) / 15.0f;
            b.at(x, y) = float(x) / 15.0f + 0.05f * float(y) / 15.0f;
        }
    CHECK(std::abs(metrics::ssim(a, b) - ssim_reference(a, b)) <= 1e-6);

    Image ra = random_image(20, 14, 3, 8);
    Image rb = random_image(20, 14, 3, 9);
    CHECK(std::abs(metrics::ssim(ra, rb) - ssim_reference(ra, rb)) <= 1e-6);

    CHECK_THROWS_AS(metrics::ssim(Image(10, 16, 1), Image(10, 16, 1)), UsageError);
    CHECK_THROWS_AS(metrics::ssim(a, Image(16, 16, 3)), ContractError);
}

TEST_CASE("warping identical static frames is perfectly consistent") {
    Image frame = random_image(32, 32, 3, 10);
    Image depth(32, 32, 1, 5.0f);
    render::GroundCamera cam;
    cam.width_px = cam.height_px = 32;

    std::vector<Image> frames{frame, frame, frame};
    std::vector<Image> depths{depth, depth, depth};
    std::vector<render::GroundCamera> cams{cam, cam, cam};
    metrics::SequenceEval eval = metrics::warp_consistency(frames, depths, cams);
    REQUIRE(eval.per_frame.size() == 2);
    CHECK(eval.per_frame[0] == kInf);
    CHECK(eval.per_frame[1] == kInf);
    CHECK(eval.coverage[0] == doctest::Approx(1.0));
    CHECK(eval.aggregate == kInf);
    CHECK(eval.frame_count == 3);
}

TEST_CASE("warp consistency input contracts") {
    Image frame(16, 16, 3);
    Image depth(16, 16, 1, 2.0f);
    render::GroundCamera cam;
    cam.width_px = cam.height_px = 16;

    CHECK_THROWS_AS(metrics::warp_consistency({frame}, {depth}, {cam}), UsageError);
    CHECK_THROWS_AS(metrics::warp_consistency({frame, frame}, {depth}, {cam, cam}), ContractError);

    // all-empty depth gives an empty mask: infinite score at zero coverage
    Image empty_depth(16, 16, 1, std::numeric_limits<float>::infinity());
    auto eval = metrics::warp_consistency({frame, frame}, {empty_depth, empty_depth}, {cam, cam});
    CHECK(eval.per_frame[0] == kInf);
    CHECK(eval.coverage[0] == 0.0);
}

TEST_CASE("renders of a textured plane from nearby poses warp consistently") {
    // one large quad at z = 10 with a gentle horizontal ramp texture
    geom::TriangleMesh mesh;
    mesh.vertices = {{-15, -15, 10}, {15, -15, 10}, {15, 15, 10}, {-15, 15, 10}};
    mesh.faces = {{0, 1, 2}, {0, 2, 3}};
    mesh.face_uvs = {{{{0, 0}, {1, 0}, {1, 1}}}, {{{0, 0}, {1, 1}, {0, 1}}}};
    Image atlas(256, 16, 3);
    for (int y = 0; y < atlas.height; ++y)
        for (int x = 0; x < atlas.width; ++x)
            for (int c = 0; c < 3; ++c) atlas.at(x, y, c) = float(x) / 255.0f;
    mesh.atlas = atlas;

    render::GroundCamera cam_a;  // at the origin looking +z
    render::GroundCamera cam_b = cam_a;
    cam_b.pose.translation = Vec3{-0.2, 0.0, 0.0};  // camera center at (0.2, 0, 0)

    render::Framebuffer fb_a = render::rasterize(mesh, cam_a);
    render::Framebuffer fb_b = render::rasterize(mesh, cam_b);

    auto eval = metrics::warp_consistency({fb_a.color, fb_b.color}, {fb_a.depth, fb_b.depth},
                                          {cam_a, cam_b});
    REQUIRE(eval.per_frame.size() == 1);
    CHECK(eval.per_frame[0] >= 40.0);
    CHECK(eval.coverage[0] >= 0.9);
    CHECK(eval.aggregate == eval.per_frame[0]);
}

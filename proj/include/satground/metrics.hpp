#pragma once

#include <vector>

#include "satground/image.hpp"
#include "satground/renderer.hpp"

namespace satground::metrics {

// Peak signal-to-noise ratio on [0,1]-scaled RGB images: 10 log10(1 / MSE).
// Identical images report +infinity.
double psnr(const Image& reference, const Image& candidate);

// Mean structural similarity with the canonical constants: 11x11 Gaussian
// window (sigma 1.5), K1 = 0.01, K2 = 0.03, L = 1; computed per channel over
// all fully-interior window positions and averaged. Images must be at least
// 11x11.
double ssim(const Image& reference, const Image& candidate);

struct SequenceEval {
    std::vector<double> per_frame;  // one score per consecutive frame pair
    std::vector<double> coverage;   // valid-mask fraction per pair
    double aggregate = 0.0;         // arithmetic mean of per_frame
    int frame_count = 0;
};

// Deterministic temporal-consistency stand-in: each frame i is warped into
// camera i+1 through the rendered depth of frame i+1 and the relative pose;
// the score is the PSNR over pixels that land in-frame with depths agreeing
// within 5%. depths are single-channel meters, +inf marks empty pixels.
SequenceEval warp_consistency(const std::vector<Image>& frames, const std::vector<Image>& depths,
                              const std::vector<render::GroundCamera>& cameras);

}  // namespace satground::metrics

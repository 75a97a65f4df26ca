#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "satground/image.hpp"
#include "satground/tensor.hpp"

namespace satground::sampler {

// Linear-beta DDPM-style schedule. alpha_bar(t) is the cumulative product of
// (1 - beta) up to and including t; alpha_bar(-1) is defined as 1 so that the
// final DDIM step returns the predicted clean latent.
struct NoiseSchedule {
    int num_train_steps = 0;
    std::vector<double> betas;
    std::vector<double> alphas;
    std::vector<double> alpha_bars;

    double alpha_bar(int t) const;
};

NoiseSchedule make_schedule(int num_train_steps = 1000, double beta_start = 1e-4,
                            double beta_end = 0.02);

// Opaque conditioning carried to noise predictors. Feature grids stand in for
// the outputs of learned encoders; predictors are free to ignore any part.
struct ConditionBundle {
    std::optional<Tensor4> sat_features;     // scene-layout features
    std::optional<Tensor4> motion_features;  // camera-motion features
    std::vector<Image> sat_appearance;       // raw ground-view satellite renders
    bool null_condition = false;             // marks the CFG unconditional branch
};

// Which conditions the unconditional CFG branch drops (zeroed features and
// the null flag set).
enum class CfgNullMode { DropBoth, DropSat, DropTemporal };

ConditionBundle null_bundle(const ConditionBundle& cond, CfgNullMode mode = CfgNullMode::DropBoth);

// Noise-predictor contract: maps (latent block, timestep, condition) to a
// predicted-noise tensor of exactly the noise-block shape.
using NoisePredictor = std::function<Tensor4(const Tensor4&, int, const ConditionBundle&)>;

// Predicts zero noise everywhere.
NoisePredictor zero_denoiser();

// Closed-form optimal epsilon predictor for data distributed N(mu, sigma^2 I):
//   eps_hat(z_t, t) = sqrt(1 - abar_t) * (z_t - sqrt(abar_t) * mu)
//                     / (abar_t * sigma^2 + 1 - abar_t)
NoisePredictor oracle_gaussian_denoiser(double mu, double sigma, const NoiseSchedule& sched);

// Replays externally computed predictions keyed by timestep.
NoisePredictor file_predictor(const std::filesystem::path& path);
NoisePredictor file_predictor(std::map<int, Tensor4> by_timestep);

// z_t = sqrt(abar_t) z0 + sqrt(1 - abar_t) eps
Tensor4 add_noise(const Tensor4& z0, int t, const Tensor4& eps, const NoiseSchedule& sched);

// Deterministic (eta = 0) DDIM update from t to t_prev < t:
//   x0_hat  = (z_t - sqrt(1 - abar_t) eps_hat) / sqrt(abar_t)
//   z_prev  = sqrt(abar_prev) x0_hat + sqrt(1 - abar_prev) eps_hat
Tensor4 ddim_step(const Tensor4& z_t, const Tensor4& eps_hat, int t, int t_prev,
                  const NoiseSchedule& sched);

// eps_uncond + scale * (eps_cond - eps_uncond); scale 0 and 1 return the
// respective branch bit-exactly.
Tensor4 cfg_combine(const Tensor4& eps_uncond, const Tensor4& eps_cond, double scale);

// Descending inference timesteps: num_steps integers uniformly spaced over
// [0, num_train_steps), always covering both endpoints.
std::vector<int> inference_timesteps(int num_train_steps, int num_steps);

struct LatentShape {
    int views = 1;
    int channels = 4;
    int height = 32;
    int width = 32;
};

struct SampleOptions {
    int num_steps = 20;
    double cfg_scale = 1.0;
    std::uint64_t seed = 0;
    CfgNullMode null_mode = CfgNullMode::DropBoth;
};

// Satellite-guided sampling: z_T drawn from the seeded normal stream, then a
// DDIM loop over the inference timesteps. With cfg_scale != 1 the predictor
// runs twice per step (conditional and null-condition branch) and the
// predictions are CFG-combined. Pure function of (inputs, seed).
Tensor4 sample_guided(const NoisePredictor& predictor, const ConditionBundle& cond,
                      const LatentShape& shape, const SampleOptions& opts,
                      const NoiseSchedule& sched);

// Satellite-temporal sampling. z_init_slice (shape 1 x C x h x w) is repeated
// num_views times into the init block; at every step the predictor receives
// the channel concatenation [init block, noise block] (num_views x 2C x h x w)
// and must return noise of the noise-block shape. Only the noise block is
// denoised; the init block never changes.
Tensor4 sample_temporal(const NoisePredictor& predictor_phi, const Tensor4& z_init_slice,
                        const ConditionBundle& cond, int num_views, const SampleOptions& opts,
                        const NoiseSchedule& sched);

// Noise-prediction MSE on a temporal latent z'_0 = [init block, z block]: the
// z block is noised to timestep t with eps and the loss is the mean squared
// error between eps and the predictor output.
double training_loss(const NoisePredictor& predictor, const Tensor4& z_prime_0, int t,
                     const ConditionBundle& cond, const Tensor4& eps, const NoiseSchedule& sched);

// Pixel <-> latent codec stand-ins for the pretrained autoencoder.
struct LatentCodec {
    std::string name;
    int factor = 1;
    std::function<Tensor4(const Image&)> encode;  // -> (1, C, h, w)
    std::function<Image(const Tensor4&)> decode;  // (1, C, h, w) -> image
};

// Lossless: latent = pixels, decode(encode(x)) == x bit-exact.
LatentCodec identity_codec();
// Box-average downsampling by `factor` on encode, nearest-neighbor upsampling
// on decode. factor must divide both image dimensions.
LatentCodec downscale_codec(int factor);

}  // namespace satground::sampler

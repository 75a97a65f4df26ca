#include "satground/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "satground/errors.hpp"
#include "satground/rng.hpp"

namespace satground::sampler {

namespace {

void check_same_shape(const Tensor4& a, const Tensor4& b, const char* what) {
    if (!a.same_shape(b))
        throw ContractError(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " +
                            b.shape_str());
}

Tensor4 draw_normal(std::uint64_t seed, int views, int channels, int height, int width) {
    Tensor4 z(views, channels, height, width);
    NormalRng rng(seed);
    for (double& x : z.data) x = rng.normal();
    return z;
}

Tensor4 run_predictor(const NoisePredictor& predictor, const Tensor4& latent, int t,
                      const ConditionBundle& cond, const SampleOptions& opts,
                      const Tensor4& noise_shape_ref) {
    Tensor4 eps_hat;
    if (opts.cfg_scale == 1.0) {
        eps_hat = predictor(latent, t, cond);
    } else {
        Tensor4 eps_cond = predictor(latent, t, cond);
        Tensor4 eps_uncond = predictor(latent, t, null_bundle(cond, opts.null_mode));
        check_same_shape(eps_cond, eps_uncond, "cfg branches");
        eps_hat = cfg_combine(eps_uncond, eps_cond, opts.cfg_scale);
    }
    check_same_shape(eps_hat, noise_shape_ref, "predictor output");
    if (!eps_hat.all_finite()) throw ContractError("predictor output contains non-finite values");
    return eps_hat;
}

}  // namespace

double NoiseSchedule::alpha_bar(int t) const {
    if (t == -1) return 1.0;
    if (t < 0 || t >= num_train_steps)
        throw ContractError("timestep " + std::to_string(t) + " outside [0, " +
                            std::to_string(num_train_steps) + ")");
    return alpha_bars[std::size_t(t)];
}

NoiseSchedule make_schedule(int num_train_steps, double beta_start, double beta_end) {
    if (num_train_steps < 1) throw UsageError("num_train_steps must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
        throw UsageError("require 0 < beta_start <= beta_end < 1");
    NoiseSchedule s;
    s.num_train_steps = num_train_steps;
    s.betas.resize(num_train_steps);
    s.alphas.resize(num_train_steps);
    s.alpha_bars.resize(num_train_steps);
    double abar = 1.0;
    for (int i = 0; i < num_train_steps; ++i) {
        double frac = num_train_steps == 1 ? 0.0 : double(i) / (num_train_steps - 1);
        s.betas[i] = beta_start + (beta_end - beta_start) * frac;
        s.alphas[i] = 1.0 - s.betas[i];
        abar *= s.alphas[i];
        s.alpha_bars[i] = abar;
    }
    return s;
}

ConditionBundle null_bundle(const ConditionBundle& cond, CfgNullMode mode) {
    ConditionBundle out = cond;
    out.null_condition = true;
    bool drop_sat = mode == CfgNullMode::DropBoth || mode == CfgNullMode::DropSat;
    bool drop_temporal = mode == CfgNullMode::DropBoth || mode == CfgNullMode::DropTemporal;
    if (drop_sat) {
        if (out.sat_features) std::fill(out.sat_features->data.begin(), out.sat_features->data.end(), 0.0);
        for (Image& img : out.sat_appearance) std::fill(img.data.begin(), img.data.end(), 0.0f);
    }
    if (drop_temporal && out.motion_features)
        std::fill(out.motion_features->data.begin(), out.motion_features->data.end(), 0.0);
    return out;
}

NoisePredictor zero_denoiser() {
    return [](const Tensor4& latent, int, const ConditionBundle&) {
        return Tensor4(latent.views, latent.channels, latent.height, latent.width);
    };
}

NoisePredictor oracle_gaussian_denoiser(double mu, double sigma, const NoiseSchedule& sched) {
    if (sigma < 0.0) throw UsageError("sigma must be >= 0");
    return [mu, sigma, sched](const Tensor4& z_t, int t, const ConditionBundle&) {
        const double abar = sched.alpha_bar(t);
        const double sqrt_abar = std::sqrt(abar);
        const double num = std::sqrt(1.0 - abar);
        const double den = abar * sigma * sigma + 1.0 - abar;
        Tensor4 out = z_t;
        for (double& x : out.data) x = num * (x - sqrt_abar * mu) / den;
        return out;
    };
}

NoisePredictor file_predictor(const std::filesystem::path& path) {
    return file_predictor(read_noise_bundle(path));
}

NoisePredictor file_predictor(std::map<int, Tensor4> by_timestep) {
    auto table = std::make_shared<std::map<int, Tensor4>>(std::move(by_timestep));
    return [table](const Tensor4&, int t, const ConditionBundle&) {
        auto it = table->find(t);
        if (it == table->end())
            throw ValidationError("noise bundle has no prediction for timestep " + std::to_string(t));
        return it->second;
    };
}

Tensor4 add_noise(const Tensor4& z0, int t, const Tensor4& eps, const NoiseSchedule& sched) {
    check_same_shape(z0, eps, "add_noise");
    if (t < 0 || t >= sched.num_train_steps)
        throw UsageError("add_noise timestep outside [0, num_train_steps)");
    const double abar = sched.alpha_bar(t);
    const double a = std::sqrt(abar), b = std::sqrt(1.0 - abar);
    Tensor4 out = z0;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = a * z0.data[i] + b * eps.data[i];
    return out;
}

Tensor4 ddim_step(const Tensor4& z_t, const Tensor4& eps_hat, int t, int t_prev,
                  const NoiseSchedule& sched) {
    check_same_shape(z_t, eps_hat, "ddim_step");
    if (t_prev >= t) throw UsageError("ddim_step requires t_prev < t");
    const double abar_t = sched.alpha_bar(t);
    const double abar_prev = sched.alpha_bar(t_prev);
    const double inv_sqrt_abar_t = 1.0 / std::sqrt(abar_t);
    const double sqrt_one_minus_t = std::sqrt(1.0 - abar_t);
    const double sqrt_abar_prev = std::sqrt(abar_prev);
    const double sqrt_one_minus_prev = std::sqrt(1.0 - abar_prev);
    Tensor4 out = z_t;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        double x0 = (z_t.data[i] - sqrt_one_minus_t * eps_hat.data[i]) * inv_sqrt_abar_t;
        out.data[i] = sqrt_abar_prev * x0 + sqrt_one_minus_prev * eps_hat.data[i];
    }
    return out;
}

Tensor4 cfg_combine(const Tensor4& eps_uncond, const Tensor4& eps_cond, double scale) {
    check_same_shape(eps_uncond, eps_cond, "cfg_combine");
    if (scale == 0.0) return eps_uncond;
    if (scale == 1.0) return eps_cond;
    Tensor4 out = eps_uncond;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = eps_uncond.data[i] + scale * (eps_cond.data[i] - eps_uncond.data[i]);
    return out;
}

std::vector<int> inference_timesteps(int num_train_steps, int num_steps) {
    if (num_train_steps < 1) throw UsageError("num_train_steps must be >= 1");
    if (num_steps < 1 || num_steps > num_train_steps)
        throw UsageError("num_steps must lie in [1, num_train_steps]");
    std::vector<int> ts;
    if (num_steps == 1) {
        ts.push_back(num_train_steps - 1);
        return ts;
    }
    for (int i = num_steps - 1; i >= 0; --i)
        ts.push_back(int(std::lround(double(i) * (num_train_steps - 1) / (num_steps - 1))));
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

Tensor4 sample_guided(const NoisePredictor& predictor, const ConditionBundle& cond,
                      const LatentShape& shape, const SampleOptions& opts,
                      const NoiseSchedule& sched) {
    if (shape.views < 1 || shape.channels < 1 || shape.height < 1 || shape.width < 1)
        throw UsageError("latent shape components must be >= 1");
    Tensor4 z = draw_normal(opts.seed, shape.views, shape.channels, shape.height, shape.width);
    const std::vector<int> ts = inference_timesteps(sched.num_train_steps, opts.num_steps);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const int t = ts[i];
        const int t_prev = i + 1 < ts.size() ? ts[i + 1] : -1;
        Tensor4 eps_hat = run_predictor(predictor, z, t, cond, opts, z);
        z = ddim_step(z, eps_hat, t, t_prev, sched);
    }
    return z;
}

Tensor4 sample_temporal(const NoisePredictor& predictor_phi, const Tensor4& z_init_slice,
                        const ConditionBundle& cond, int num_views, const SampleOptions& opts,
                        const NoiseSchedule& sched) {
    if (num_views < 1) throw UsageError("num_views must be >= 1");
    if (z_init_slice.views != 1)
        throw ContractError("z_init_slice must have views == 1, got " + z_init_slice.shape_str());
    const Tensor4 init = repeat_views(z_init_slice, num_views);
    Tensor4 z = draw_normal(opts.seed, num_views, z_init_slice.channels, z_init_slice.height,
                            z_init_slice.width);
    const std::vector<int> ts = inference_timesteps(sched.num_train_steps, opts.num_steps);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const int t = ts[i];
        const int t_prev = i + 1 < ts.size() ? ts[i + 1] : -1;
        Tensor4 z_prime = concat_channels(init, z);
        Tensor4 eps_hat = run_predictor(predictor_phi, z_prime, t, cond, opts, z);
        z = ddim_step(z, eps_hat, t, t_prev, sched);
    }
    return z;
}

double training_loss(const NoisePredictor& predictor, const Tensor4& z_prime_0, int t,
                     const ConditionBundle& cond, const Tensor4& eps, const NoiseSchedule& sched) {
    if (z_prime_0.channels % 2 != 0)
        throw ContractError("temporal latent must carry an even channel count, got " +
                            z_prime_0.shape_str());
    const int c = z_prime_0.channels / 2;
    Tensor4 init = channel_slice(z_prime_0, 0, c);
    Tensor4 z0 = channel_slice(z_prime_0, c, c);
    check_same_shape(z0, eps, "training_loss");
    Tensor4 z_t = add_noise(z0, t, eps, sched);
    Tensor4 z_prime_t = concat_channels(init, z_t);
    Tensor4 pred = predictor(z_prime_t, t, cond);
    check_same_shape(pred, eps, "predictor output");
    double acc = 0.0;
    for (std::size_t i = 0; i < eps.data.size(); ++i) {
        double d = eps.data[i] - pred.data[i];
        acc += d * d;
    }
    return acc / double(eps.data.size());
}

LatentCodec identity_codec() {
    LatentCodec codec;
    codec.name = "identity";
    codec.factor = 1;
    codec.encode = [](const Image& img) {
        Tensor4 t(1, img.channels, img.height, img.width);
        for (int c = 0; c < img.channels; ++c)
            for (int y = 0; y < img.height; ++y)
                for (int x = 0; x < img.width; ++x) t.at(0, c, y, x) = img.at(x, y, c);
        return t;
    };
    codec.decode = [](const Tensor4& t) {
        Image img(t.width, t.height, t.channels);
        for (int c = 0; c < t.channels; ++c)
            for (int y = 0; y < t.height; ++y)
                for (int x = 0; x < t.width; ++x) img.at(x, y, c) = float(t.at(0, c, y, x));
        return img;
    };
    return codec;
}

LatentCodec downscale_codec(int factor) {
    if (factor < 1) throw UsageError("codec factor must be >= 1");
    LatentCodec codec;
    codec.name = "downscale" + std::to_string(factor);
    codec.factor = factor;
    codec.encode = [factor](const Image& img) {
        if (img.width % factor != 0 || img.height % factor != 0)
            throw UsageError("codec factor must divide the image dimensions");
        Tensor4 t(1, img.channels, img.height / factor, img.width / factor);
        const double inv = 1.0 / (double(factor) * factor);
        for (int c = 0; c < img.channels; ++c)
            for (int y = 0; y < t.height; ++y)
                for (int x = 0; x < t.width; ++x) {
                    double acc = 0.0;
                    for (int dy = 0; dy < factor; ++dy)
                        for (int dx = 0; dx < factor; ++dx)
                            acc += img.at(x * factor + dx, y * factor + dy, c);
                    t.at(0, c, y, x) = acc * inv;
                }
        return t;
    };
    codec.decode = [factor](const Tensor4& t) {
        Image img(t.width * factor, t.height * factor, t.channels);
        for (int c = 0; c < t.channels; ++c)
            for (int y = 0; y < img.height; ++y)
                for (int x = 0; x < img.width; ++x)
                    img.at(x, y, c) = float(t.at(0, c, y / factor, x / factor));
        return img;
    };
    return codec;
}

}  // namespace satground::sampler

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace satground {

// Dense row-major 4-D tensor of doubles with shape (views, channels, height,
// width). Latent blocks, predicted noise and condition features all use this
// layout.
struct Tensor4 {
    int views = 0;
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Tensor4() = default;
    Tensor4(int v, int c, int h, int w, double fill = 0.0);

    std::size_t count() const { return data.size(); }
    bool empty() const { return data.empty(); }

    double& at(int v, int c, int y, int x) {
        return data[((std::size_t(v) * channels + c) * height + y) * width + x];
    }
    double at(int v, int c, int y, int x) const {
        return data[((std::size_t(v) * channels + c) * height + y) * width + x];
    }

    bool same_shape(const Tensor4& o) const {
        return views == o.views && channels == o.channels && height == o.height && width == o.width;
    }
    bool all_finite() const;
    std::string shape_str() const;  // "(v, c, h, w)"
};

// [a, b] along the channel axis; shapes must agree elsewhere.
Tensor4 concat_channels(const Tensor4& a, const Tensor4& b);
// Channels [begin, begin+count) of t.
Tensor4 channel_slice(const Tensor4& t, int begin, int count);
// t repeated `copies` times along the view axis (t must have views == 1).
Tensor4 repeat_views(const Tensor4& t, int copies);

// Single-tensor container, format "sgtn v1":
//   magic "SGTN" | u32 version=1 | u32 dtype=8 (bytes per scalar, IEEE-754
//   binary64) | u32 ndim=4 | u64 shape[4] | row-major little-endian payload.
Tensor4 read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor4& t, const std::filesystem::path& path);

// Multi-entry container keyed by denoising timestep, format "sgnp v1":
//   magic "SGNP" | u32 version=1 | u32 count | count entries of
//   (i64 timestep | u32 ndim=4 | u64 shape[4] | payload as above).
// Used by the file-replay noise predictor.
std::map<int, Tensor4> read_noise_bundle(const std::filesystem::path& path);
void write_noise_bundle(const std::map<int, Tensor4>& entries, const std::filesystem::path& path);

}  // namespace satground

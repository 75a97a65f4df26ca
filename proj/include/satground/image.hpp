#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace satground {

// Row-major interleaved float image. Color images carry 3 channels with
// values nominally in [0, 1]; single-channel images hold depths or other
// real-valued rasters.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.0f);

    static Image rgb(int w, int h, float r = 0, float g = 0, float b = 0);

    bool empty() const { return data.empty(); }
    std::size_t pixel_count() const { return std::size_t(width) * height; }

    float& at(int x, int y, int c = 0) { return data[(std::size_t(y) * width + x) * channels + c]; }
    float at(int x, int y, int c = 0) const { return data[(std::size_t(y) * width + x) * channels + c]; }

    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// 8-bit binary PPM (P6). Values are clamped to [0, 1] and rounded on write.
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const Image& img, const std::filesystem::path& path);

// PFM ("PF" = 3 channels, "Pf" = 1 channel), scanlines stored bottom-up,
// little-endian. Used for depth maps and float-precision color.
Image read_pfm(const std::filesystem::path& path);
void write_pfm(const Image& img, const std::filesystem::path& path);

// Dispatches on the file extension (.ppm / .pfm).
Image read_image(const std::filesystem::path& path);
void write_image(const Image& img, const std::filesystem::path& path);

}  // namespace satground

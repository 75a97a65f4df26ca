#include "satground/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "satground/errors.hpp"

namespace satground {

Image::Image(int w, int h, int c, float fill) : width(w), height(h), channels(c) {
    if (w < 0 || h < 0 || c < 1) throw UsageError("invalid image dimensions");
    data.assign(std::size_t(w) * h * c, fill);
}

Image Image::rgb(int w, int h, float r, float g, float b) {
    Image img(w, h, 3);
    for (std::size_t i = 0; i < img.data.size(); i += 3) {
        img.data[i] = r;
        img.data[i + 1] = g;
        img.data[i + 2] = b;
    }
    return img;
}

namespace {

// Skips whitespace and '#' comment lines in PNM headers.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(char(c));
            while ((c = in.peek()) != EOF && !std::isspace(c)) tok.push_back(char(in.get()));
            return tok;
        }
    }
    return tok;
}

int parse_pnm_int(std::istream& in, const std::string& what, const std::filesystem::path& path) {
    std::string tok = next_token(in);
    try {
        return std::stoi(tok);
    } catch (const std::exception&) {
        throw IoError("bad " + what + " in " + path.string());
    }
}

}  // namespace

Image read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string magic = next_token(in);
    if (magic != "P6") throw IoError("not a binary PPM (P6): " + path.string());
    int w = parse_pnm_int(in, "width", path);
    int h = parse_pnm_int(in, "height", path);
    int maxval = parse_pnm_int(in, "maxval", path);
    if (w <= 0 || h <= 0 || maxval != 255) throw IoError("unsupported PPM header in " + path.string());
    in.get();  // single whitespace after maxval
    std::vector<std::uint8_t> raw(std::size_t(w) * h * 3);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
    if (!in) throw IoError("truncated PPM payload in " + path.string());
    Image img(w, h, 3);
    for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = float(raw[i]) / 255.0f;
    return img;
}

void write_ppm(const Image& img, const std::filesystem::path& path) {
    if (img.channels != 3) throw ContractError("write_ppm expects a 3-channel image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> raw(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        float v = std::clamp(img.data[i], 0.0f, 1.0f);
        raw[i] = std::uint8_t(std::lround(v * 255.0f));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), std::streamsize(raw.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

Image read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string magic = next_token(in);
    int channels = 0;
    if (magic == "PF")
        channels = 3;
    else if (magic == "Pf")
        channels = 1;
    else
        throw IoError("not a PFM: " + path.string());
    int w = parse_pnm_int(in, "width", path);
    int h = parse_pnm_int(in, "height", path);
    std::string scale_tok = next_token(in);
    double scale = 0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception&) {
        throw IoError("bad scale in " + path.string());
    }
    if (scale >= 0) throw IoError("big-endian PFM not supported: " + path.string());
    in.get();
    Image img(w, h, channels);
    std::vector<float> row(std::size_t(w) * channels);
    // PFM scanlines are stored bottom-up.
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
        if (!in) throw IoError("truncated PFM payload in " + path.string());
        std::memcpy(&img.data[std::size_t(y) * w * channels], row.data(), row.size() * sizeof(float));
    }
    return img;
}

void write_pfm(const Image& img, const std::filesystem::path& path) {
    if (img.channels != 1 && img.channels != 3)
        throw ContractError("write_pfm expects a 1- or 3-channel image");
    static_assert(std::endian::native == std::endian::little, "PFM writer assumes little-endian");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << (img.channels == 3 ? "PF" : "Pf") << "\n" << img.width << " " << img.height << "\n-1.0\n";
    for (int y = img.height - 1; y >= 0; --y) {
        out.write(reinterpret_cast<const char*>(&img.data[std::size_t(y) * img.width * img.channels]),
                  std::streamsize(std::size_t(img.width) * img.channels * sizeof(float)));
    }
    if (!out) throw IoError("failed writing " + path.string());
}

Image read_image(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    if (ext == ".ppm") return read_ppm(path);
    if (ext == ".pfm") return read_pfm(path);
    throw IoError("unsupported image extension: " + path.string());
}

void write_image(const Image& img, const std::filesystem::path& path) {
    auto ext = path.extension().string();
    if (ext == ".ppm")
        write_ppm(img, path);
    else if (ext == ".pfm")
        write_pfm(img, path);
    else
        throw IoError("unsupported image extension: " + path.string());
}

}  // namespace satground

#include "satground/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "satground/errors.hpp"

namespace satground {

Tensor4::Tensor4(int v, int c, int h, int w, double fill) : views(v), channels(c), height(h), width(w) {
    if (v < 1 || c < 1 || h < 1 || w < 1) throw UsageError("tensor shape components must be >= 1");
    data.assign(std::size_t(v) * c * h * w, fill);
}

bool Tensor4::all_finite() const {
    for (double x : data)
        if (!std::isfinite(x)) return false;
    return true;
}

std::string Tensor4::shape_str() const {
    std::ostringstream os;
    os << "(" << views << ", " << channels << ", " << height << ", " << width << ")";
    return os.str();
}

Tensor4 concat_channels(const Tensor4& a, const Tensor4& b) {
    if (a.views != b.views || a.height != b.height || a.width != b.width)
        throw ContractError("concat_channels: shapes " + a.shape_str() + " and " + b.shape_str() +
                            " differ outside the channel axis");
    Tensor4 out(a.views, a.channels + b.channels, a.height, a.width);
    const std::size_t plane = std::size_t(a.height) * a.width;
    for (int v = 0; v < a.views; ++v) {
        std::memcpy(&out.data[std::size_t(v) * out.channels * plane],
                    &a.data[std::size_t(v) * a.channels * plane], a.channels * plane * sizeof(double));
        std::memcpy(&out.data[(std::size_t(v) * out.channels + a.channels) * plane],
                    &b.data[std::size_t(v) * b.channels * plane], b.channels * plane * sizeof(double));
    }
    return out;
}

Tensor4 channel_slice(const Tensor4& t, int begin, int count) {
    if (begin < 0 || count < 1 || begin + count > t.channels)
        throw ContractError("channel_slice: range out of bounds for shape " + t.shape_str());
    Tensor4 out(t.views, count, t.height, t.width);
    const std::size_t plane = std::size_t(t.height) * t.width;
    for (int v = 0; v < t.views; ++v)
        std::memcpy(&out.data[std::size_t(v) * count * plane],
                    &t.data[(std::size_t(v) * t.channels + begin) * plane],
                    count * plane * sizeof(double));
    return out;
}

Tensor4 repeat_views(const Tensor4& t, int copies) {
    if (t.views != 1) throw ContractError("repeat_views expects a single-view tensor, got " + t.shape_str());
    if (copies < 1) throw UsageError("repeat_views: copies must be >= 1");
    Tensor4 out(copies, t.channels, t.height, t.width);
    for (int v = 0; v < copies; ++v)
        std::memcpy(&out.data[std::size_t(v) * t.data.size()], t.data.data(),
                    t.data.size() * sizeof(double));
    return out;
}

namespace {

constexpr char kTensorMagic[4] = {'S', 'G', 'T', 'N'};
constexpr char kBundleMagic[4] = {'S', 'G', 'N', 'P'};

static_assert(std::endian::native == std::endian::little, "tensor containers assume little-endian");

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const std::filesystem::path& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("truncated tensor container: " + path.string());
    return v;
}

void write_tensor_body(std::ostream& out, const Tensor4& t) {
    write_raw<std::uint32_t>(out, 4);  // ndim
    for (int d : {t.views, t.channels, t.height, t.width}) write_raw<std::uint64_t>(out, std::uint64_t(d));
    out.write(reinterpret_cast<const char*>(t.data.data()),
              std::streamsize(t.data.size() * sizeof(double)));
}

Tensor4 read_tensor_body(std::istream& in, const std::filesystem::path& path) {
    auto ndim = read_raw<std::uint32_t>(in, path);
    if (ndim != 4) throw IoError("tensor container must hold 4-D tensors: " + path.string());
    std::uint64_t dims[4];
    for (auto& d : dims) d = read_raw<std::uint64_t>(in, path);
    for (auto d : dims)
        if (d < 1 || d > (1u << 30)) throw IoError("implausible tensor dimension in " + path.string());
    Tensor4 t{int(dims[0]), int(dims[1]), int(dims[2]), int(dims[3])};
    in.read(reinterpret_cast<char*>(t.data.data()), std::streamsize(t.data.size() * sizeof(double)));
    if (!in) throw IoError("truncated tensor payload: " + path.string());
    return t;
}

}  // namespace

void write_tensor(const Tensor4& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(kTensorMagic, 4);
    write_raw<std::uint32_t>(out, 1);  // version
    write_raw<std::uint32_t>(out, 8);  // bytes per scalar
    write_tensor_body(out, t);
    if (!out) throw IoError("failed writing " + path.string());
}

Tensor4 read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kTensorMagic, 4) != 0)
        throw IoError("not a tensor container: " + path.string());
    if (read_raw<std::uint32_t>(in, path) != 1) throw IoError("unsupported tensor version: " + path.string());
    if (read_raw<std::uint32_t>(in, path) != 8) throw IoError("unsupported tensor dtype: " + path.string());
    return read_tensor_body(in, path);
}

void write_noise_bundle(const std::map<int, Tensor4>& entries, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(kBundleMagic, 4);
    write_raw<std::uint32_t>(out, 1);
    write_raw<std::uint32_t>(out, std::uint32_t(entries.size()));
    for (const auto& [t, tensor] : entries) {
        write_raw<std::int64_t>(out, t);
        write_tensor_body(out, tensor);
    }
    if (!out) throw IoError("failed writing " + path.string());
}

std::map<int, Tensor4> read_noise_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kBundleMagic, 4) != 0)
        throw IoError("not a noise bundle: " + path.string());
    if (read_raw<std::uint32_t>(in, path) != 1) throw IoError("unsupported bundle version: " + path.string());
    auto count = read_raw<std::uint32_t>(in, path);
    std::map<int, Tensor4> entries;
    for (std::uint32_t i = 0; i < count; ++i) {
        auto t = read_raw<std::int64_t>(in, path);
        entries.emplace(int(t), read_tensor_body(in, path));
    }
    return entries;
}

}  // namespace satground

#pragma once

#include <cstdint>
#include <random>

namespace satground {

// "satground-normal-v1" random stream.
//
// Engine: std::mt19937_64 seeded directly with `seed` (the engine's output
// sequence is fully pinned by the C++ standard). Uniforms take the top 53
// bits: (x >> 11) * 2^-53 in [0, 1). Normals use the Box-Muller transform
// with the second variate cached, so one normal consumes either two engine
// outputs or none. This avoids std::normal_distribution, whose algorithm is
// implementation-defined.
class NormalRng {
public:
    explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Unbiased draw from [0, n) by rejection; used for seeded shuffles.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace satground

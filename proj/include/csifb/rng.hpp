// SPDX-License-Identifier: Apache-2.0
//
// csifb -- CSI training/feedback simulation for wideband FDD massive MIMO

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace csifb {

// splitmix64 finalizer, used to hash (seed, tag, indices) into engine seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Purpose tags keep substreams disjoint: adding a consumer of randomness for
// one purpose never shifts the draws seen by another.
enum class StreamTag : std::uint64_t {
    geometry = 1,
    training_matrix,
    training_noise,
    channel,
    quant_error,
    dither,
    spreading,
    feedback_noise,
};

// Counter-derived random substream. The engine seed is a hash of the master
// seed, a purpose tag and up to three context indices (covariance/user index,
// training-matrix index, trial index), so results are bit-identical
// regardless of scheduling order.
class RngStream {
public:
    RngStream(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0,
              std::uint64_t b = 0, std::uint64_t c = 0) {
        std::uint64_t s = mix64(seed);
        s = mix64(s ^ static_cast<std::uint64_t>(tag));
        s = mix64(s ^ a);
        s = mix64(s ^ b);
        s = mix64(s ^ c);
        engine_.seed(s);
    }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard real Gaussian via Box-Muller (kept implementation-defined-free
    // so output is identical across toolchains).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = mag * std::sin(two_pi * u2);
        have_spare_ = true;
        return mag * std::cos(two_pi * u2);
    }

    // Standard circularly-symmetric complex Gaussian, E|z|^2 = 1.
    std::complex<double> cgaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re * 0.7071067811865475244, im * 0.7071067811865475244};
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace csifb

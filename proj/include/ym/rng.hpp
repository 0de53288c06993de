#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ym {

// Derives well-mixed 64-bit seeds from (seed, stream) pairs.
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic RNG stream. Distinct (seed, stream) pairs give independent
// streams. Variate transforms below use raw engine bits only, so the draw
// sequence does not depend on the standard library's distribution internals.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
        std::uint64_t s = seed ^ (0xb5ad4eceda1ce2a9ULL * (stream + 1));
        std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
        eng_.seed(seq);
    }

    std::uint64_t bits() { return eng_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double u01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    // Uniform on [0, 2*pi)-style ranges.
    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Standard normal via Box-Muller; stateless (two engine draws per call)
    // so the full RNG state is just the engine state.
    double normal() {
        double u = 1.0 - u01();  // (0, 1]
        double v = u01();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
    }

    std::string state() const {
        std::ostringstream os;
        os << eng_;
        return os.str();
    }

    void restore(const std::string& s) {
        std::istringstream is(s);
        is >> eng_;
        if (!is) throw std::invalid_argument("RngStream::restore: bad state string");
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::mt19937_64 eng_;
};

}  // namespace ym

#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace fksteer {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Hash a (seed, lane, step) triple into one well-mixed seed. Used to derive
/// independent substreams so parallel and serial execution draw identical noise.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t lane, std::uint64_t step) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    s ^= lane + 0x632BE59BD9B4E019ull;
    h ^= splitmix64(s);
    s ^= step + 0x9E3779B97F4A7C15ull;
    h ^= splitmix64(s);
    return h;
}

/// Explicit random stream: mt19937_64 engine with hand-rolled distributions so
/// that output is bit-identical across standard-library implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) {
        // run the seed through splitmix so adjacent seeds give unrelated streams
        std::uint64_t s = seed;
        engine_.seed(splitmix64(s));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// uniform in [0, 1), 53-bit resolution
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// standard normal via Box-Muller (no cached spare, draws two uniforms)
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]: keeps log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

private:
    std::mt19937_64 engine_;
};

inline RandomStream derive_stream(std::uint64_t seed, std::uint64_t lane, std::uint64_t step) {
    return RandomStream(mix_seed(seed, lane, step));
}

}  // namespace fksteer

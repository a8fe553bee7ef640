#ifndef PEVGRID_RNG_HPP
#define PEVGRID_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>

namespace pevgrid {

// splitmix64 finalizer. Used both as the stream generator and for seed
// derivation, so every stream in a run is a pure function of the master
// seed and a (domain, index) pair.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Stream derivation domains. Keeping these disjoint guarantees that e.g.
// iteration streams never collide with vehicle streams.
namespace stream_domain {
    constexpr std::uint64_t iteration = 0x49544552ull;  // per-MCS-iteration seed
    constexpr std::uint64_t vehicle = 0x56454849ull;    // per-vehicle behavior stream
    constexpr std::uint64_t allocation = 0x414C4C4Full; // per-iteration bus allocation
}

// Counter-based derivation: child = f(parent, domain, index). Any
// iteration or vehicle is reproducible in isolation.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t domain,
                                    std::uint64_t index)
{
    return mix64(mix64(parent ^ (domain * 0xD6E8FEB86659FD93ull)) ^
                 (index * 0xA3B195354A39B70Dull));
}

// Deterministic, platform-independent random stream (splitmix64 core,
// Box-Muller normals). std::normal_distribution is implementation-defined,
// which would break the bit-identical reproducibility contract.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64()
    {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Box-Muller; consumes exactly two uniforms per draw (no spare caching,
    // keeps the draw count predictable for the determinism contract).
    double normal(double mean, double sd)
    {
        const double u1 = uniform01();
        const double u2 = uniform01();
        // log1p(-u1) = log(1-u1), safe since u1 < 1
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // normal truncated below at zero by clamping (bounded, deterministic)
    double normal_clamped0(double mean, double sd)
    {
        const double x = normal(mean, sd);
        return x < 0.0 ? 0.0 : x;
    }

    bool coin() { return (next_u64() & 1ull) != 0ull; }

    // categorical draw over non-negative weights; returns index in [0, n)
    std::size_t categorical(std::span<const double> weights)
    {
        double total = 0.0;
        for (double w : weights)
            total += w;
        const double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc)
                return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    std::uint64_t state_;
};

} // namespace pevgrid

#endif

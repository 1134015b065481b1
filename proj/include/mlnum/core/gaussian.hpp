#pragma once

#include <cmath>
#include <cstdint>

#include "mlnum/core/philox.hpp"

namespace mlnum {

namespace detail {
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// One Philox block -> one uniform pair. First coordinate is kept in (0,1]
// so that log() below is always finite.
inline void uniform_pair(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t block, double& u_open, double& u_half) {
    const auto w = Philox4x32::block(
        seed, {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
               static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)});
    const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
    u_open = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;  // (0,1]
    u_half = static_cast<double>(b >> 11) * 0x1.0p-53;        // [0,1)
}
}  // namespace detail

// Box-Muller pair from one counter block.
inline void normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t block,
                        double& z0, double& z1) {
    double u1, u2;
    detail::uniform_pair(seed, stream, block, u1, u2);
    const double r = std::sqrt(-2.0 * std::log(u1));
    z0 = r * std::cos(detail::kTwoPi * u2);
    z1 = r * std::sin(detail::kTwoPi * u2);
}

// draw_index-th standard normal of the stream; pure in all arguments.
inline double standard_normal(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t draw_index) {
    double z0, z1;
    normal_pair(seed, stream, draw_index >> 1, z0, z1);
    return (draw_index & 1) ? z1 : z0;
}

// draw_index-th uniform in [0,1).
inline double standard_uniform(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t draw_index) {
    double u1, u2;
    detail::uniform_pair(seed, stream, draw_index >> 1, u1, u2);
    return (draw_index & 1) ? u2 : u1 - 0x1.0p-53;  // map (0,1] back onto [0,1)
}

// Sequential convenience view over a (seed, stream) pair. Deterministic:
// the n-th draw equals standard_normal(seed, stream, n).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    double normal() { return standard_normal(seed_, stream_, next_++); }
    double uniform() { return standard_uniform(seed_, stream_, next_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [0, n); n must be < 2^32 for negligible modulo bias use.
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t next_ = 0;
};

}  // namespace mlnum

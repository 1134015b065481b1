#include "mlnum/sde/brownian.hpp"

#include <cmath>
#include <stdexcept>

#include "mlnum/core/gaussian.hpp"

namespace mlnum::sde {

BrownianBatch sample_brownian(const TimeGrid& grid, int d, int B, std::uint64_t seed,
                              std::uint64_t stream, Exec exec) {
    if (B < 1 || d < 1) throw std::invalid_argument("sample_brownian requires B >= 1, d >= 1");
    BrownianBatch out;
    out.B = B;
    out.N = grid.N;
    out.d = d;
    out.dt = grid.dt();
    out.seed = seed;
    out.stream = stream;
    out.dw.resize(static_cast<std::size_t>(B) * grid.N * d);

    const double sqrt_dt = std::sqrt(out.dt);
    const std::size_t per_sample = static_cast<std::size_t>(grid.N) * d;
    for_chunks(static_cast<std::size_t>(B), kDefaultChunk, exec,
               [&](std::size_t, std::size_t b_begin, std::size_t b_end) {
                   for (std::size_t b = b_begin; b < b_end; ++b) {
                       double* row = out.dw.data() + b * per_sample;
                       for (std::size_t i = 0; i < per_sample; ++i)
                           row[i] = sqrt_dt * standard_normal(seed, stream, b * per_sample + i);
                   }
               });
    return out;
}

}  // namespace mlnum::sde

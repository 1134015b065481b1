#pragma once

#include <cstddef>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace mlnum {

enum class Exec { Serial, Parallel };

#if defined(_OPENMP)
inline constexpr bool kHaveOpenMP = true;
#else
inline constexpr bool kHaveOpenMP = false;
#endif

// Default work-chunk width for batched reductions. Chunk boundaries are part
// of the numerical contract: floating-point results depend on the chunk grid
// but not on the thread count, so Serial and Parallel agree bitwise.
inline constexpr std::size_t kDefaultChunk = 16;

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) {
    return (n + chunk - 1) / chunk;
}

// Runs f(chunk_index, begin, end) over [0, n) split into fixed chunks.
// f must not touch shared mutable state except its own chunk slot.
template <class F>
void for_chunks(std::size_t n, std::size_t chunk, Exec exec, F&& f) {
    const std::size_t nc = chunk_count(n, chunk);
#if defined(_OPENMP)
    if (exec == Exec::Parallel && nc > 1) {
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < static_cast<long long>(nc); ++c) {
            const std::size_t begin = static_cast<std::size_t>(c) * chunk;
            const std::size_t end = begin + chunk < n ? begin + chunk : n;
            f(static_cast<std::size_t>(c), begin, end);
        }
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t c = 0; c < nc; ++c) {
        const std::size_t begin = c * chunk;
        const std::size_t end = begin + chunk < n ? begin + chunk : n;
        f(c, begin, end);
    }
}

// Chunked sum of term(i): per-chunk left-to-right partials, folded in chunk
// order. Identical bits for Serial and Parallel.
template <class Term>
double chunked_sum(std::size_t n, std::size_t chunk, Exec exec, Term&& term) {
    const std::size_t nc = chunk_count(n, chunk);
    std::vector<double> partial(nc, 0.0);
    for_chunks(n, chunk, exec, [&](std::size_t c, std::size_t b, std::size_t e) {
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i) s += term(i);
        partial[c] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace mlnum

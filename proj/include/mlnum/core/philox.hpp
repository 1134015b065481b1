#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace mlnum {

// Philox4x32-10 counter-based generator. A value is a pure function of
// (key, counter), which is what makes partition-independent parallel
// sampling possible: every consumer derives its counter from logical
// indices (sample, step, component), never from call order.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kBump0 = 0x9E3779B9u;
    static constexpr std::uint32_t kBump1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              std::array<std::uint32_t, 4> ctr) {
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
                   static_cast<std::uint32_t>(p0)};
            k0 += kBump0;
            k1 += kBump1;
        }
        return ctr;
    }
};

// splitmix64 finalizer, used to derive substream ids.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// FNV-1a over a string; stable stream naming.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::uint64_t stream_id(std::string_view name) { return fnv1a64(name); }

// Derived stream: same (seed) key, decorrelated counter-space id.
inline std::uint64_t substream(std::uint64_t stream, std::uint64_t k) {
    return mix64(stream ^ mix64(k));
}

}  // namespace mlnum

#pragma once

#include <cstdint>
#include <string_view>

namespace tierlab {

// splitmix64 finalizer. Used both as the PRNG step and as a stateless
// per-event hash so sampling decisions do not depend on call order.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
    return mix64(seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2)));
}

// Deterministic PRNG. All randomness in a run flows from one root seed
// through named substreams, so components draw independently but
// reproducibly regardless of evaluation order elsewhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : state_(mix64(seed)) {}

    Rng substream(std::string_view name) const {
        std::uint64_t h = state_;
        for (char c : name)
            h = hash_combine(h, static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
        return Rng(h);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    // Unbiased integer in [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t bounded(std::uint64_t n) {
        if (n <= 1) return 0;
        while (true) {
            std::uint64_t x = next_u64();
            __uint128_t m = static_cast<__uint128_t>(x) * n;
            std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= n || lo >= (0ull - n) % n)
                return static_cast<std::uint64_t>(m >> 64);
        }
    }

    double next_double() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace tierlab

#pragma once

#include <cstdint>

namespace swarmsched {

// SplitMix64: tiny, portable, and identical on every platform, which the
// reproducibility contract depends on. Standard-library distributions are
// avoided on purpose (their draw sequences are implementation-defined).
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]: never returns zero, used where a draw seeds a
    // weight that must keep masked support strictly positive.
    double uniform_open01() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Uniform byte in [0, 255]; the 8-bit analogue of uniform01().
    uint32_t next_byte() { return static_cast<uint32_t>(next_u64() >> 56); }

    // Uniform integer in [0, bound) by rejection (bound > 0).
    uint64_t next_below(uint64_t bound) {
        const uint64_t limit = bound * (UINT64_MAX / bound);
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

private:
    uint64_t state_;
};

// Derives an independent stream id from (seed, epoch, particle). Each swarm
// particle draws from its own stream, so results do not depend on how
// particles are distributed over workers.
inline uint64_t derive_stream(uint64_t seed, uint64_t epoch, uint64_t particle) {
    SplitMix64 mixer(seed);
    uint64_t a = mixer.next_u64();
    SplitMix64 mixer2(a ^ (0x9e3779b97f4a7c15ULL * (epoch + 1)));
    uint64_t b = mixer2.next_u64();
    SplitMix64 mixer3(b ^ (0xbf58476d1ce4e5b9ULL * (particle + 1)));
    return mixer3.next_u64();
}

}  // namespace swarmsched

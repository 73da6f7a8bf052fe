#pragma once

#include <cmath>
#include <cstdint>

namespace crosstrack {

// xoroshiro128+ with a splitmix64 seeder. Self-contained so that seeded
// streams are bit-identical across compilers and standard libraries,
// which the end-to-end determinism contract depends on.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) { reseed(seed); }

    void reseed(uint64_t seed) {
        uint64_t x = seed;
        s0_ = splitmix(x);
        s1_ = splitmix(x);
        have_spare_ = false;
    }

    uint64_t next_u64() {
        const uint64_t a = s0_;
        uint64_t b = s1_;
        const uint64_t r = a + b;
        b ^= a;
        s0_ = rotl(a, 24) ^ b ^ (b << 16);
        s1_ = rotl(b, 37);
        return r;
    }

    // uniform in [0, 1)
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // zero-mean unit normal via Box-Muller (polar form avoided to keep the
    // draw count per sample fixed)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

    // independent child stream, e.g. one per sensor channel
    Rng fork(uint64_t tag) {
        uint64_t x = next_u64() ^ (tag * 0x9e3779b97f4a7c15ULL);
        return Rng(splitmix(x));
    }

private:
    static uint64_t splitmix(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    uint64_t s0_ = 0, s1_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace crosstrack

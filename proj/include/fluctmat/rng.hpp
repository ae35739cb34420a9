#pragma once

#include <cstdint>

namespace fluctmat {

// splitmix64: used both as a stand-alone mixer and to seed xoshiro streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** with explicit state; deterministic across platforms.
class Xoshiro256 {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed = 1) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64_next(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Unbiased integer in [0, n) by rejection; n >= 1.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53-bit resolution.
    double uniform() { return ((*this)() >> 11) * 0x1.0p-53; }

    int sign() { return ((*this)() >> 63) ? 1 : -1; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Derives the RNG stream for one Monte Carlo sample. Streams depend only on
// (master_seed, sample_index), never on which worker runs the sample, so
// results are identical for any worker count.
inline Xoshiro256 sample_stream(std::uint64_t master_seed, std::uint64_t sample_index) {
    std::uint64_t mix = master_seed;
    std::uint64_t a = splitmix64_next(mix);
    mix ^= (sample_index + 0x632be59bd9b4e019ULL) * 0xff51afd7ed558ccdULL;
    std::uint64_t b = splitmix64_next(mix);
    return Xoshiro256(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

}  // namespace fluctmat

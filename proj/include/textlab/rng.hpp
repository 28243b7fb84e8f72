#pragma once

// Deterministic, platform-stable random numbers.
//
// Everything that samples (variation shuffles, path picks, policy choices)
// goes through Rng so that a (seed, label) pair fully determines the output
// on every platform. std::mt19937 + std:: distributions are deliberately
// avoided: libstdc++ and libc++ disagree on distribution internals.

#include <cstdint>
#include <string_view>
#include <vector>

namespace textlab {

// splitmix64 (Steele, Lea, Flood) -- tiny, well mixed, stable.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// FNV-1a over the label, then mixed with the master seed. Used to derive
// named sub-seeds ("world", "sampler", "policy", per-variation ids, ...)
// from a single user-facing --seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    SplitMix64 mix(master ^ h);
    mix.next();
    return mix.next();
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_.next(); }

    // Uniform in [0, bound) via rejection sampling, bias-free.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t v = gen_.next();
        while (v >= limit) v = gen_.next();
        return v % bound;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    double unit() {
        // 53 random bits -> [0,1)
        return static_cast<double>(gen_.next() >> 11) * (1.0 / 9007199254740992.0);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }

private:
    SplitMix64 gen_;
};

}  // namespace textlab

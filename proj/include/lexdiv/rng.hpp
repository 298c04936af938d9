#pragma once

#include <cstdint>
#include <vector>

namespace lexdiv {

// Deterministic PRNG used everywhere randomness is needed (sampling,
// pairing shuffles, bootstrap resampling, mock embeddings). The generator
// is xoshiro256** seeded through splitmix64, so sequences are bit-exact
// and easy to reproduce in other languages. The exact recipe:
//
//   splitmix64(x):  x += 0x9E3779B97F4A7C15
//                   z = x; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9
//                   z = (z ^ z>>27) * 0x94D049BB133111EB
//                   return z ^ z>>31
//
//   state s[0..3]:  four successive splitmix64 outputs from the seed
//   next():         xoshiro256** step (rotl(s[1]*5, 7) * 9)
//   bounded(n):     next() % n
//   shuffle(v):     Fisher-Yates, i = n-1..1, j = bounded(i+1), swap(v[i],v[j])
//   substream(seed, k): generator seeded with scramble(seed + (k+1)*0x9E3779B97F4A7C15)
//                   where scramble is the splitmix64 output function
//
// Only change this with a format-version bump: sample/shuffle outputs are
// part of the documented interface.

inline uint64_t splitmix64_next(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// splitmix64 output function applied to a single value.
inline uint64_t scramble64(uint64_t x) {
    uint64_t s = x;
    return splitmix64_next(s);
}

class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& word : state_) word = splitmix64_next(x);
    }

    // Independent stream k of a master seed; O(1) regardless of k.
    static Rng substream(uint64_t seed, uint64_t k) {
        return Rng(scramble64(seed + (k + 1) * 0x9E3779B97F4A7C15ULL));
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Integer in [0, n). n must be > 0. Modulo bias is acceptable here and
    // keeps the recipe trivial to restate.
    uint64_t bounded(uint64_t n) { return next() % n; }

    // Double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // A uniform permutation of 0..n-1.
    std::vector<size_t> permutation(size_t n) {
        std::vector<size_t> idx(n);
        for (size_t i = 0; i < n; ++i) idx[i] = i;
        shuffle(idx);
        return idx;
    }

    // k indices sampled without replacement from 0..n-1, returned ascending
    // so that downstream corpora keep their input order.
    std::vector<size_t> sample_indices(size_t n, size_t k);

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4] = {};
};

} // namespace lexdiv

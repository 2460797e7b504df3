#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace atoms {

// FNV-1a, used for content digests and seed-stream derivation. Not cryptographic.
inline uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed split function: child_seed(suite, stream, i) is the seed of the i-th
// instance of `stream` (a task id or other named substream) under a suite seed.
inline uint64_t child_seed(uint64_t suite_seed, std::string_view stream, uint64_t index) {
    return splitmix64(splitmix64(suite_seed ^ fnv1a64(stream)) + index);
}

// Deterministic RNG wrapper. All draws go through hand-rolled transforms of
// mt19937_64 output so that sequences are identical across standard libraries
// (std::uniform_int_distribution and friends are implementation-defined).
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }

    // Inclusive range. Modulo draw; bias is negligible for the tiny ranges used here.
    int range(int lo, int hi) {
        if (lo > hi) throw std::invalid_argument("Rng::range: lo > hi");
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next() % span);
    }

    size_t index(size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::index: empty range");
        return static_cast<size_t>(next() % n);
    }

    bool coin() { return (next() & 1ull) != 0; }

    double real01() {
        // 53 random bits in [0, 1).
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Box-Muller; one fresh pair per call, cosine branch only.
    double normal(double mean, double stddev) {
        double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = real01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
        return mean + stddev * z;
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (size_t i = v.size() - 1; i > 0; --i) {
            std::swap(v[i], v[index(i + 1)]);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace atoms

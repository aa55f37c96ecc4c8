#pragma once

#include <cstdint>
#include <vector>

#include "synclab/mat.hpp"

namespace synclab {

// All randomness in the library flows through these helpers so that a seed
// fixes every sampled value bit-for-bit across platforms.  Standard
// distributions are avoided on purpose: their exact output is
// implementation-defined.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent stream seed for substream `k` of `seed`.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t s = seed ^ (0xd1b54a32d192ed03ULL * (k + 1));
    return splitmix64(s);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0,1), 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Symmetric interval helpers used for matrix / coefficient sampling.
    double symmetric() { return uniform(-1.0, 1.0); }
    double symmetric(double a) { return uniform(-a, a); }

    Vec uniform_vec(const Vec& lo, const Vec& hi) {
        Vec v(lo.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = uniform(lo[i], hi[i]);
        return v;
    }

    Mat uniform_mat(std::size_t rows, std::size_t cols, double lo, double hi) {
        Mat m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }

  private:
    std::uint64_t state_;
};

// Axis-aligned box, used for initial-condition and drive sampling.
struct Box {
    Vec lo, hi;
    std::size_t dim() const { return lo.size(); }
    static Box cube(std::size_t d, double half_width) {
        Box b;
        b.lo.assign(d, -half_width);
        b.hi.assign(d, half_width);
        return b;
    }
};

}  // namespace synclab

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace hoclust {

// Counter-based splittable RNG. A stream is identified by (seed, stream id);
// the draw sequence is a pure function of that pair, so replays are
// bit-identical and child streams can be handed to worker threads without
// any coordination. Mixing is the splitmix64 finalizer.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    RngStream() = default;
    RngStream(std::uint64_t seed_, std::uint64_t stream_)
        : seed(seed_), stream(stream_) {
        state_ = mix64(seed_ + 0x9e3779b97f4a7c15ULL * (stream_ + 1));
        state_ = mix64(state_ ^ mix64(stream_ + 0x632be59bd9b4e019ULL));
    }

    // Hierarchical split: experiment -> trial -> draw site.
    [[nodiscard]] RngStream derive(std::uint64_t child) const {
        return RngStream(seed, mix64(stream ^ mix64(child + 0xbf58476d1ce4e5b9ULL)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform on [0, 1), 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log argument.
    double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Uniform integer in [0, n). Multiply-shift; bias is O(n / 2^64).
    std::uint64_t uniform_int(std::uint64_t n) {
        return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller, two uniforms per draw, no cached state.
    double normal() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::vector<double> normal_vector(std::size_t n) {
        std::vector<double> out(n);
        for (auto& x : out) x = normal();
        return out;
    }

    // Sorted k-subset of {0, ..., n-1} by partial Fisher-Yates.
    std::vector<int> combination(int n, int k) {
        std::vector<int> pool(n);
        for (int i = 0; i < n; ++i) pool[i] = i;
        for (int i = 0; i < k; ++i) {
            int j = i + int(uniform_int(std::uint64_t(n - i)));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    // Uniform permutation of {0, ..., n-1}.
    std::vector<int> permutation(int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (int i = n - 1; i > 0; --i) {
            int j = int(uniform_int(std::uint64_t(i + 1)));
            std::swap(p[i], p[j]);
        }
        return p;
    }

  private:
    std::uint64_t state_ = 0;

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }
};

}  // namespace hoclust

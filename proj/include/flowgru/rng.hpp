#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace flowgru {

// Deterministic random source used everywhere reproducibility matters.
// std::mt19937_64's raw output is pinned by the standard, but the std
// distributions are not, so the draws below are spelled out by hand.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n); n must be nonzero. Lemire's multiply-shift
    // (the slight bias at 64 bits is far below anything observable here).
    std::uint64_t below(std::uint64_t n) {
        using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>(gen_()) * n) >> 64);
    }

    // Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    // Independent stream for a named role so that, say, the train/test split
    // and the weight init never consume from the same sequence.
    SeededRng fork(std::uint64_t role) const {
        return SeededRng(splitmix64(seed_ + 0x9e3779b97f4a7c15ull * (role + 1)));
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream roles used by the pipeline; keeping them in one place documents
// which stage draws from which stream.
namespace rng_role {
inline constexpr std::uint64_t split = 1;
inline constexpr std::uint64_t smote = 2;
inline constexpr std::uint64_t init = 3;
inline constexpr std::uint64_t batch_order = 4;
inline constexpr std::uint64_t synth = 5;
}  // namespace rng_role

}  // namespace flowgru

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace iqp {

// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of the index-th child stream of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Seedable, splittable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. All derived draws (bounded integers, Bernoulli, binomial) are
/// computed here rather than through <random> distributions so that a seed
/// reproduces the same instance on every standard library.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)), seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }
    result_type operator()() { return engine_(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    bool bernoulli(double p) { return uniform01() < p; }

    /// Sum of n independent Bernoulli(p) draws.
    std::size_t binomial(std::size_t n, double p);

    /// Independent child generator for stream `index`.
    Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace iqp

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace bpgof {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) noexcept;

// Deterministic child seed from a master seed and an index path.
// derive(s, {a, b}) depends only on its arguments, never on call order.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

// xoshiro256** seeded through splitmix64.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;

    // uniform on [0,1) with 53 random bits
    double uniform() noexcept;
    // uniform on (0,1)
    double uniform_pos() noexcept;
    double exponential() noexcept;
    double normal() noexcept;
    // Poisson(lambda), lambda >= 0
    std::uint64_t poisson(double lambda);
    // Gamma(shape, 1) for a positive integer shape
    double gamma_int(unsigned shape) noexcept;
    bool bernoulli(double p) noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace bpgof

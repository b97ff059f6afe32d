#include "bpgof/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bpgof {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}

// Transformed rejection with squeeze (Hormann 1993), valid for lambda >= 10.
std::uint64_t poisson_ptrs(Rng& rng, double lambda)
{
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform_pos();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::uint64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        const double lhs = std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b);
        const double rhs = -lambda + k * loglam - std::lgamma(k + 1.0);
        if (lhs <= rhs) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

} // namespace

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t h = mix64(master);
    for (std::uint64_t p : path) {
        h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    }
    return h;
}

Rng::Rng(std::uint64_t seed) noexcept
{
    std::uint64_t x = seed;
    for (auto& w : s_) {
        x += kGolden;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        w = z ^ (z >> 31);
    }
}

Rng::result_type Rng::operator()() noexcept
{
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

double Rng::uniform() noexcept
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() noexcept
{
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

double Rng::exponential() noexcept
{
    return -std::log(uniform_pos());
}

double Rng::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

std::uint64_t Rng::poisson(double lambda)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("poisson: lambda must be finite and nonnegative");
    }
    if (lambda == 0.0) {
        return 0;
    }
    if (lambda >= 30.0) {
        return poisson_ptrs(*this, lambda);
    }
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
        ++k;
        prod *= uniform();
    }
    return k;
}

double Rng::gamma_int(unsigned shape) noexcept
{
    double g = 0.0;
    for (unsigned i = 0; i < shape; ++i) {
        g += exponential();
    }
    return g;
}

bool Rng::bernoulli(double p) noexcept
{
    return uniform() < p;
}

} // namespace bpgof

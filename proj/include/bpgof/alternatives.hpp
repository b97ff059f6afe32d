#pragma once

#include "bpgof/bpd.hpp"
#include "bpgof/rng.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bpgof {

// bivariate binomial: m trials with marginal success probabilities p1, p2 and joint p3
struct BBSpec {
    unsigned m = 1;
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
};

// bivariate negative binomial: PB(g0 G, g1 G, g2 G) given G ~ Gamma(nu, 1)
struct BNBSpec {
    unsigned nu = 1;
    double g0 = 0.0, g1 = 0.0, g2 = 0.0;
};

// mixture p PB(a) + (1 - p) PB(b)
struct PPBSpec {
    double p = 0.5;
    ThetaBP a, b;
};

// bivariate Neyman type A: Poisson(lambda) clusters, each PB(l1 + l3, l2 + l3, l3)
struct NTABSpec {
    double lambda = 0.0;
    double l1 = 0.0, l2 = 0.0, l3 = 0.0;
};

// bivariate logarithmic series with pgf log(1 - l1 u1 - l2 u2 - l3 u1 u2) / log(1 - l1 - l2 - l3)
struct SLBSpec {
    double l1 = 0.0, l2 = 0.0, l3 = 0.0;
};

using AltSpec = std::variant<BBSpec, BNBSpec, PPBSpec, NTABSpec, SLBSpec>;

struct AltMoments {
    double mean1, mean2;
    double var1, var2;
    double cov;
    double disp1, disp2;  // var / mean
    double corr;
};

void validate(const AltSpec& spec);
std::string describe(const AltSpec& spec);
// dist in bb|bnb|ppb|ntab|slb; params in the order of the struct fields (ppb: p, a1, a2, a3, b1, b2, b3)
AltSpec make_alt(std::string_view dist, const std::vector<double>& params);

AltMoments alt_moments(const AltSpec& spec);

struct SlbCell {
    std::uint32_t r, s;
    double p;
};
// support cells by increasing r + s until the mass reaches 1 - tail
std::vector<SlbCell> slb_pmf(const SLBSpec& spec, double tail = 1e-10);

// sampler with per-spec precomputation; safe to share across threads
class AltSampler {
public:
    explicit AltSampler(AltSpec spec);
    const AltSpec& spec() const noexcept { return spec_; }
    BivariateCountSample sample(std::size_t n, Rng& rng) const;

private:
    AltSpec spec_;
    std::vector<SlbCell> slb_cells_;
    std::vector<double> slb_cum_;
};

BivariateCountSample sample_alt(const AltSpec& spec, std::size_t n, Rng& rng);

} // namespace bpgof

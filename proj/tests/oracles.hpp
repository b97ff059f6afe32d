#pragma once

#include "bpgof/bpd.hpp"
#include "bpgof/gof_stats.hpp"

namespace oracle {

// n * integral over [0,1]^2 of (g_n - g)^2 u1^a1 u2^a2
double r_quadrature(const bpgof::BivariateCountSample& s, const bpgof::ThetaBP& th, const bpgof::WeightExponents& w);

// n * integral over [0,1]^2 of (D1^2 + D2^2) u1^a1 u2^a2
double s_quadrature(const bpgof::BivariateCountSample& s, const bpgof::ThetaBP& th, const bpgof::WeightExponents& w);

// plain quadruple sum over 0..M+extra
double r_naive(const bpgof::BivariateCountSample& s, const bpgof::ThetaBP& th, const bpgof::WeightExponents& w,
               std::size_t extra = 15);

} // namespace oracle

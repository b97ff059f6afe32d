#pragma once

namespace bpgof {

// regularized upper incomplete gamma Q(a, x)
double gamma_q(double a, double x);

// upper tail of the chi-square law with df degrees of freedom
double chi2_sf(double x, double df);

// P(K > lambda) for the Kolmogorov limit law
double kolmogorov_sf(double lambda);

} // namespace bpgof

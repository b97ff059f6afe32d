#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>

namespace oracle {

namespace {

using boost::math::quadrature::gauss_kronrod;

double integrate01(const std::function<double(double)>& f)
{
    return gauss_kronrod<double, 21>::integrate(f, 0.0, 1.0, 15, 1e-11);
}

// integral of h(u) u^a on [0,1]; for a < 0 the substitution u = t^(1/(1+a)) removes the endpoint singularity
double weighted01(const std::function<double(double)>& h, double a)
{
    if (a < 0.0) {
        const double k = 1.0 / (1.0 + a);
        return k * integrate01([&](double t) { return h(std::pow(t, k)); });
    }
    return integrate01([&](double u) { return h(u) * std::pow(u, a); });
}

double integrate_square(const std::function<double(double, double)>& f, const bpgof::WeightExponents& w)
{
    auto outer = [&](double u1) { return weighted01([&](double u2) { return f(u1, u2); }, w.a2); };
    return weighted01(outer, w.a1);
}

} // namespace

double r_quadrature(const bpgof::BivariateCountSample& s, const bpgof::ThetaBP& th, const bpgof::WeightExponents& w)
{
    auto f = [&](double u1, double u2) {
        const double d = bpgof::epgf(u1, u2, s) - bpgof::pgf(u1, u2, th);
        return d * d;
    };
    return static_cast<double>(s.n()) * integrate_square(f, w);
}

double s_quadrature(const bpgof::BivariateCountSample& s, const bpgof::ThetaBP& th, const bpgof::WeightExponents& w)
{
    auto f = [&](double u1, double u2) {
        const double g = bpgof::epgf(u1, u2, s);
        const double d1 = bpgof::epgf_partial(u1, u2, s, 0) - (th.lambda1() + th.theta3 * u2) * g;
        const double d2 = bpgof::epgf_partial(u1, u2, s, 1) - (th.lambda2() + th.theta3 * u1) * g;
        return d1 * d1 + d2 * d2;
    };
    return static_cast<double>(s.n()) * integrate_square(f, w);
}

double r_naive(const bpgof::BivariateCountSample& s, const bpgof::ThetaBP& th, const bpgof::WeightExponents& w,
               std::size_t extra)
{
    const std::size_t g = s.max_count() + extra;
    const auto tab = bpgof::pmf_table(th, g, g);
    std::vector<double> e((g + 1) * (g + 1));
    for (std::size_t i = 0; i <= g; ++i) {
        for (std::size_t j = 0; j <= g; ++j) {
            e[i * (g + 1) + j] = s.pn(static_cast<long>(i), static_cast<long>(j)) -
                                 tab(static_cast<long>(i), static_cast<long>(j));
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i <= g; ++i) {
        for (std::size_t j = 0; j <= g; ++j) {
            const double eij = e[i * (g + 1) + j];
            for (std::size_t k = 0; k <= g; ++k) {
                for (std::size_t l = 0; l <= g; ++l) {
                    total += eij * e[k * (g + 1) + l] /
                             ((static_cast<double>(i + k) + w.a1 + 1.0) * (static_cast<double>(j + l) + w.a2 + 1.0));
                }
            }
        }
    }
    return static_cast<double>(s.n()) * total;
}

} // namespace oracle

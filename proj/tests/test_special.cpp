#include "bpgof/special.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bpgof;

TEST_CASE("gamma_q matches boost")
{
    for (double a : {0.5, 1.0, 2.5, 7.0, 48.5, 300.0}) {
        for (double x : {0.01, 0.3, 1.0, 3.0, 8.0, 40.0, 280.0, 350.0}) {
            const double ref = boost::math::gamma_q(a, x);
            INFO("a=" << a << " x=" << x);
            CHECK(gamma_q(a, x) == Catch::Approx(ref).epsilon(1e-10).margin(1e-300));
        }
    }
    CHECK(gamma_q(2.0, 0.0) == 1.0);
}

TEST_CASE("chi-square upper tail")
{
    CHECK(chi2_sf(0.0, 2) == 1.0);
    CHECK(chi2_sf(-1.0, 3) == 1.0);
    // df 2 is exponential with mean 2
    CHECK(chi2_sf(5.991464547107979, 2) == Catch::Approx(0.05).epsilon(1e-12));
    for (double df : {1.0, 2.0, 5.0, 97.0}) {
        boost::math::chi_squared_distribution<double> d(df);
        for (double x : {0.2, 1.0, 4.0, 20.0, 120.0}) {
            CHECK(chi2_sf(x, df) == Catch::Approx(boost::math::cdf(boost::math::complement(d, x))).epsilon(1e-10));
        }
    }
}

TEST_CASE("kolmogorov limit tail")
{
    CHECK(kolmogorov_sf(0.0) == 1.0);
    CHECK(kolmogorov_sf(1.3580986393225507) == Catch::Approx(0.05).epsilon(1e-9));
    CHECK(kolmogorov_sf(1.6276236115189502) == Catch::Approx(0.01).epsilon(1e-9));
    // small argument: dual series
    CHECK(kolmogorov_sf(0.5) == Catch::Approx(0.9639452436648751).epsilon(1e-12));
    CHECK(kolmogorov_sf(0.3) == Catch::Approx(0.9999906941986655).epsilon(1e-12));
    CHECK(kolmogorov_sf(5.0) == Catch::Approx(3.8574996959278356e-22).epsilon(1e-9));
}

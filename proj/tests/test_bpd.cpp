#include "bpgof/bpd.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace bpgof;

namespace {

double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace

TEST_CASE("theta validation")
{
    CHECK(ThetaBP{1, 1, 0.5}.valid());
    CHECK_FALSE(ThetaBP{1, 1, 1}.valid());
    CHECK_FALSE(ThetaBP{1, 0.4, 0.5}.valid());
    CHECK_FALSE(ThetaBP{1, 1, -0.1}.valid());
    CHECK(ThetaBP{1, 1, 0}.valid(true));
    CHECK_FALSE(ThetaBP{1, 1, 0}.valid(false));
    CHECK_THROWS_AS(ThetaBP({1, 1, 2}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((ThetaDP{{1.0}, 0.1}.validate()), std::invalid_argument);
    CHECK_NOTHROW((ThetaDP{{1.0, 2.0, 0.5}, 0.1}.validate()));
}

TEST_CASE("pmf_direct values")
{
    CHECK(pmf_direct(0, 0, {1, 1, 0.5}) == Catch::Approx(0.22313016014842982).epsilon(1e-15));
    CHECK(pmf_direct(0, 0, {2, 3, 0.7}) == Catch::Approx(std::exp(0.7 - 5.0)).epsilon(1e-15));
    // 50-digit evaluation of the finite sum
    CHECK(rel_err(pmf_direct(3, 2, {1.5, 1.0, 0.62}), 0.04097970557445206670603) < 1e-14);
}

TEST_CASE("recursion table agrees with the direct sum")
{
    for (const ThetaBP th : {ThetaBP{1, 1, 0.25}, ThetaBP{1, 1, 0.5}, ThetaBP{1, 1, 0.75}, ThetaBP{1.5, 1, 0.62},
                             ThetaBP{4, 2.5, 0.1}, ThetaBP{0.3, 0.2, 0.05}}) {
        const auto tab = pmf_table(th, 20, 20);
        for (unsigned r = 0; r <= 20; ++r) {
            for (unsigned s = 0; s <= 20; ++s) {
                REQUIRE(rel_err(tab(r, s), pmf_direct(r, s, th)) < 1e-12);
            }
        }
    }
    const auto single = pmf_table({1, 1, 0.5}, 0, 0);
    CHECK(single.values().size() == 1);
    CHECK(single(0, 0) == Catch::Approx(0.2231301601).margin(1e-10));
    CHECK(single(-1, 0) == 0.0);
    const auto t = pmf_table({1, 1, 0.25}, 3, 3);
    CHECK(t(1, 0) == Catch::Approx(0.75 * std::exp(-1.75)).epsilon(1e-15));
}

TEST_CASE("table mass")
{
    const ThetaBP th{1.5, 1.0, 0.62};
    const double m20 = pmf_table(th, 20, 20).mass();
    CHECK(m20 > 1 - 1e-6);
    CHECK(m20 <= 1.0 + 1e-15);
    for (const ThetaBP t : {ThetaBP{1, 1, 0.25}, ThetaBP{6, 4, 2}}) {
        const auto g = default_grid(t);
        CHECK(pmf_table(t, g, g).mass() >= 1 - 1e-10);
    }
}

TEST_CASE("gradient identities")
{
    const ThetaBP th{1, 1, 0.5};
    const double p = std::exp(-1.5);
    const auto g0 = pmf_grad(0, 0, th);
    CHECK(g0[0] == Catch::Approx(-p));
    CHECK(g0[1] == Catch::Approx(-p));
    CHECK(g0[2] == Catch::Approx(p));

    const double h = 1e-6;
    for (auto [r, s] : {std::pair{2u, 1u}, std::pair{0u, 3u}, std::pair{4u, 4u}}) {
        const auto g = pmf_grad(r, s, th);
        for (int k = 0; k < 3; ++k) {
            ThetaBP up = th, dn = th;
            (k == 0 ? up.theta1 : k == 1 ? up.theta2 : up.theta3) += h;
            (k == 0 ? dn.theta1 : k == 1 ? dn.theta2 : dn.theta3) -= h;
            const double fd = (pmf_direct(r, s, up) - pmf_direct(r, s, dn)) / (2 * h);
            CHECK(std::abs(g[k] - fd) < 1e-6);
        }
    }

    std::array<double, 3> total{};
    for (unsigned r = 0; r <= 30; ++r) {
        for (unsigned s = 0; s <= 30; ++s) {
            const auto g = pmf_grad(r, s, {1.5, 1.0, 0.62});
            for (int k = 0; k < 3; ++k) {
                total[k] += g[k];
            }
        }
    }
    for (double t : total) {
        CHECK(std::abs(t) < 1e-8);
    }
}

TEST_CASE("pgf against the series")
{
    const ThetaBP th{1.5, 1.0, 0.62};
    CHECK(pgf(1, 1, th) == 1.0);
    CHECK(pgf(0, 0, {1, 1, 0.5}) == Catch::Approx(std::exp(-1.5)).epsilon(1e-15));
    const auto tab = pmf_table(th, 40, 40);
    for (auto [u1, u2] : {std::pair{0.3, 0.7}, std::pair{0.0, 0.9}, std::pair{1.0, 0.2}, std::pair{0.55, 0.55}}) {
        double sum = 0.0;
        for (long r = 0; r <= 40; ++r) {
            for (long s = 0; s <= 40; ++s) {
                sum += std::pow(u1, r) * std::pow(u2, s) * tab(r, s);
            }
        }
        CHECK(std::abs(pgf(u1, u2, th) - sum) < 1e-10);
    }
}

TEST_CASE("moments")
{
    CHECK(moments({1, 1, 0.25}).corr == Catch::Approx(0.25));
    const auto m = moments({1.5, 1.0, 0.62});
    CHECK(m.e11 == Catch::Approx(2.12));
    CHECK(m.var1 == 1.5);
    CHECK(m.cov == 0.62);

    const ThetaBP th{1, 1, 0.5};
    const auto tab = pmf_table(th, 50, 50);
    double e22 = 0.0, e21 = 0.0;
    for (long r = 0; r <= 50; ++r) {
        for (long s = 0; s <= 50; ++s) {
            e22 += double(r * r * s * s) * tab(r, s);
            e21 += double(r * r * s) * tab(r, s);
        }
    }
    const auto mm = moments(th);
    CHECK(std::abs(mm.e22 - e22) < 1e-8);
    CHECK(std::abs(mm.e21 - e21) < 1e-8);
    CHECK(raw_moment(2, 2, th) == Catch::Approx(mm.e22).epsilon(1e-13));
    CHECK(raw_moment(1, 1, th) == Catch::Approx(1.5));
    CHECK(raw_moment(1, 0, {1.7, 1, 0.2}) == Catch::Approx(1.7));
    double e43 = 0.0;
    for (long r = 0; r <= 50; ++r) {
        for (long s = 0; s <= 50; ++s) {
            e43 += std::pow(double(r), 4) * std::pow(double(s), 3) * tab(r, s);
        }
    }
    CHECK(raw_moment(4, 3, th) == Catch::Approx(e43).epsilon(1e-10));
    CHECK_THROWS_AS(raw_moment(9, 0, th), std::invalid_argument);
    CHECK(stirling2(5, 2) == 15.0);
    CHECK(stirling2(7, 3) == 301.0);
    CHECK(stirling2(0, 0) == 1.0);
}

TEST_CASE("sampler moments and pmf")
{
    const ThetaBP th{1, 1, 0.5};
    Rng rng(2024);
    const std::size_t n = 200000;
    const auto s = sample_bpd(th, n, rng);
    CHECK(std::abs(s.mean1() - 1.0) < 4 * std::sqrt(1.0 / n));
    CHECK(std::abs(s.mean2() - 1.0) < 4 * std::sqrt(1.0 / n));
    // var of X1 X2 products bounds the covariance error
    const double se = std::sqrt((raw_moment(2, 2, th) - 1.5 * 1.5) / n);
    CHECK(std::abs(s.cov() - 0.5) < 4 * se);
    const auto tab = pmf_table(th, 8, 8);
    for (long r = 0; r <= 8; ++r) {
        for (long c = 0; c <= 8; ++c) {
            CHECK(std::abs(s.pn(r, c) - tab(r, c)) <= 5 * std::sqrt(tab(r, c) / n) + 1e-3);
        }
    }

    Rng a(8), b(8);
    const auto s1 = sample_bpd(th, 50, a);
    const auto s2 = sample_bpd(th, 50, b);
    CHECK(std::equal(s1.x1().begin(), s1.x1().end(), s2.x1().begin()));
    CHECK(std::equal(s1.x2().begin(), s1.x2().end(), s2.x2().begin()));

    Rng c(9);
    const auto ind = sample_bpd({2, 3, 0}, 100000, c);
    CHECK(std::abs(ind.cov()) < 4 * std::sqrt(6.0 / 100000));
}

TEST_CASE("sample summaries")
{
    const auto s = BivariateCountSample::from_pairs({{0, 0}, {1, 1}, {2, 1}, {1, 0}});
    CHECK(s.n() == 4);
    CHECK(s.mean1() == 1.0);
    CHECK(s.mean2() == 0.5);
    CHECK(s.var1() == 0.5);
    CHECK(s.var1(1) == Catch::Approx(2.0 / 3.0));
    CHECK(s.cov() == 0.25);
    CHECK(s.max_count() == 2);
    CHECK(s.count(1, 0) == 1);
    CHECK(s.count(-1, 0) == 0);
    CHECK(s.count(5, 5) == 0);
    CHECK(s.cells().size() == 4);
    double total = 0.0;
    for (long r = 0; r <= 2; ++r) {
        for (long c = 0; c <= 2; ++c) {
            total += s.pn(r, c);
        }
    }
    CHECK(total == 1.0);

    // sparse path for a wide support
    const auto w = BivariateCountSample::from_pairs({{0, 0}, {100000, 3}, {100000, 3}});
    CHECK(w.count(100000, 3) == 2);
    CHECK(w.pn(0, 0) == Catch::Approx(1.0 / 3.0));
    CHECK(w.count(99999, 3) == 0);
}

TEST_CASE("d-variate pgf and sampler")
{
    const ThetaBP th{1.5, 1.0, 0.62};
    const ThetaDP td{{1.5, 1.0}, 0.62};
    Rng rng(17);
    for (int i = 0; i < 10; ++i) {
        const double u[2] = {rng.uniform(), rng.uniform()};
        CHECK(std::abs(pgf_d(u, td) - pgf(u[0], u[1], th)) < 1e-14);
    }
    const double ones[3] = {1, 1, 1};
    CHECK(pgf_d(ones, ThetaDP{{1, 1, 1}, 0.3}) == Catch::Approx(1.0).epsilon(1e-15));

    Rng a(33), b(33);
    const auto s2 = sample_bpd(th, 200, a);
    const auto sd = sample_dpd(td, 200, b);
    for (std::size_t i = 0; i < 200; ++i) {
        REQUIRE(sd.at(i, 0) == s2.x1()[i]);
        REQUIRE(sd.at(i, 1) == s2.x2()[i]);
    }

    Rng c(44);
    const std::size_t n = 100000;
    const auto s3 = sample_dpd(ThetaDP{{1, 1, 1}, 0.3}, n, c);
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t l = k + 1; l < 3; ++l) {
            CHECK(std::abs(s3.cov(k, l) - 0.3) < 4 * std::sqrt(1.6 / n));
        }
    }
}

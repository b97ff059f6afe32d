#include "bpgof/bootstrap.hpp"
#include "bpgof/errors.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

using namespace bpgof;

TEST_CASE("order-statistic critical values")
{
    const std::vector<double> five{3, 1, 5, 2, 4};
    CHECK(critical_value(five, 0.2) == 5);
    CHECK(critical_value(five, 0.5) == 3);
    CHECK(critical_value(five, 1e-9) == 5);
    CHECK(critical_value_bracket(five, 0.2) == 4);
    CHECK(critical_value_bracket(five, 0.3) == 4);

    std::vector<double> b500(500);
    std::iota(b500.begin(), b500.end(), 1.0);
    std::reverse(b500.begin(), b500.end());
    CHECK(critical_value(b500, 0.05) == 476);
    CHECK(critical_value(b500, 0.10) == 451);
    CHECK(critical_value_bracket(b500, 0.05) == 475);
}

TEST_CASE("p-value counting rule")
{
    const std::vector<double> r{0.1, 0.5, 0.5, 0.9};
    CHECK(bootstrap_pvalue(r, -std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(bootstrap_pvalue(r, 0.5) == 0.75);
    CHECK(bootstrap_pvalue(r, 0.95) == 0.0);
}

TEST_CASE("bootstrap test is reproducible across worker counts")
{
    Rng rng(12);
    const auto s = sample_bpd({1, 1, 0.5}, 40, rng);
    BootstrapConfig cfg;
    cfg.B = 60;
    cfg.seed = 99;
    for (const StatSpec spec : {StatSpec{StatKind::W, {}}, StatSpec{StatKind::R, {1, 0}}, StatSpec{StatKind::S, {}}}) {
        cfg.max_workers = 1;
        const auto a = bootstrap_test(s, spec, cfg);
        cfg.max_workers = 4;
        const auto b = bootstrap_test(s, spec, cfg);
        CHECK(a.replicates == b.replicates);
        CHECK(a.p_value == b.p_value);
        CHECK(a.critical_values == b.critical_values);
        CHECK(a.replicates.size() == cfg.B);
        const double scaled = a.p_value * double(cfg.B);
        CHECK(scaled == std::round(scaled));
        CHECK(a.critical_values.at(0.05) == critical_value(a.replicates, 0.05));
    }
}

TEST_CASE("shared resamples give the single-statistic reports")
{
    Rng rng(21);
    const auto s = sample_bpd({1.5, 1, 0.62}, 30, rng);
    BootstrapConfig cfg;
    cfg.B = 40;
    cfg.seed = 5;
    cfg.estimator = EstimatorKind::MM;
    const std::vector<StatSpec> specs{{StatKind::R, {}}, {StatKind::S, {0.5, 0.5}}, {StatKind::W, {}}};
    const auto all = bootstrap_tests(s, specs, cfg);
    REQUIRE(all.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto one = bootstrap_test(s, specs[i], cfg);
        CHECK(one.replicates == all[i].replicates);
        CHECK(one.stat.value == all[i].stat.value);
        CHECK(one.p_value == all[i].p_value);
    }
}

TEST_CASE("bootstrap failures")
{
    const auto four = BivariateCountSample::from_pairs({{0, 0}, {1, 1}, {2, 1}, {1, 0}});
    BootstrapConfig cfg;
    cfg.B = 10;
    cfg.estimator = EstimatorKind::PP;
    try {
        bootstrap_test(four, {StatKind::W, {}}, cfg);
        FAIL("expected failure");
    } catch (const StatError& e) {
        CHECK(e.kind() == ErrorKind::EstimatorFailedOnOriginal);
    }
    cfg.estimator = EstimatorKind::MM;
    CHECK_THROWS_AS(bootstrap_test(four, {StatKind::T, {}}, cfg), std::invalid_argument);
    cfg.B = 0;
    CHECK_THROWS_AS(bootstrap_test(four, {StatKind::W, {}}, cfg), std::invalid_argument);
    cfg.B = 10;
    cfg.alphas = {1.5};
    CHECK_THROWS_AS(bootstrap_test(four, {StatKind::W, {}}, cfg), std::invalid_argument);
}

TEST_CASE("clamped original fit")
{
    const auto neg = BivariateCountSample::from_pairs({{0, 2}, {2, 0}, {1, 1}, {3, 0}, {0, 3}});
    BootstrapConfig cfg;
    cfg.B = 20;
    cfg.estimator = EstimatorKind::MM;
    CHECK_THROWS_AS(bootstrap_test(neg, {StatKind::W, {}}, cfg), StatError);
    cfg.clamp_original = true;
    const auto r = bootstrap_test(neg, {StatKind::W, {}}, cfg);
    CHECK(r.theta_hat.valid());
}

TEST_CASE("d-variate bootstrap")
{
    Rng rng(31);
    const auto s = sample_dpd(ThetaDP{{1, 1.2, 0.9}, 0.3}, 25, rng);
    const auto th = fit_dpd_mm(s);
    CHECK(th.dim() == 3);
    CHECK(th.valid());
    BootstrapConfig cfg;
    cfg.B = 30;
    cfg.seed = 8;
    const auto a = bootstrap_test_wd(s, cfg);
    cfg.max_workers = 3;
    const auto b = bootstrap_test_wd(s, cfg);
    CHECK(a.replicates == b.replicates);
    CHECK(a.p_value >= 0.0);
    CHECK(a.p_value <= 1.0);
    CHECK(a.observed == stat_Wd(s, a.theta_hat).value);
}

TEST_CASE("parallel_for covers every index once and rethrows")
{
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(50, 3,
                                 [](std::size_t i) {
                                     if (i == 17) {
                                         throw std::runtime_error("boom");
                                     }
                                 }),
                    std::runtime_error);
    CHECK(default_workers() >= 1);
}

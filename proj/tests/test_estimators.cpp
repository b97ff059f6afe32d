#include "bpgof/errors.hpp"
#include "bpgof/estimators.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace bpgof;

namespace {

const auto four = BivariateCountSample::from_pairs({{0, 0}, {1, 1}, {2, 1}, {1, 0}});

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const StatError& e) {
        return e.kind();
    }
    FAIL("expected a StatError");
    return ErrorKind::DegenerateSample;
}

const std::vector<ThetaBP> grid{{1, 1, 0.25}, {1, 1, 0.5}, {1, 1, 0.75}, {1.5, 1, 0.62},
                                {2, 1.3, 0.3}, {0.6, 0.9, 0.2}, {3, 3, 2.5}};

} // namespace

TEST_CASE("estimator names")
{
    CHECK(parse_estimator("ML") == EstimatorKind::ML);
    CHECK(parse_estimator("dz") == EstimatorKind::DZ);
    CHECK(std::string(to_string(EstimatorKind::PC)) == "PC");
    CHECK_THROWS_AS(parse_estimator("xx"), std::invalid_argument);
}

TEST_CASE("moment fit")
{
    const auto f = fit_mm(four);
    CHECK(f.theta_hat == ThetaBP{1.0, 0.5, 0.25});
    CHECK(f.converged);

    const auto flat = BivariateCountSample::from_pairs({{1, 2}, {1, 2}, {1, 2}});
    CHECK(kind_of([&] { fit_mm(flat); }) == ErrorKind::EstimateOutsideTheta);

    const auto neg = BivariateCountSample::from_pairs({{0, 2}, {2, 0}, {1, 1}});
    FitOptions clamp;
    clamp.clamp = true;
    const auto c = fit_mm(neg, clamp);
    CHECK_FALSE(c.converged);
    CHECK(c.theta_hat.theta3 == clamp.eps);
    CHECK(c.theta_hat.valid());
}

TEST_CASE("double-zero fit")
{
    CHECK(fit_dz(four).theta_hat.theta3 == Catch::Approx(1.5 + std::log(0.25)).epsilon(1e-14));
    CHECK(fit_dz(four).theta_hat.theta3 == Catch::Approx(0.1137056).epsilon(1e-6));
    const auto noz = BivariateCountSample::from_pairs({{1, 0}, {1, 1}, {0, 2}});
    CHECK(kind_of([&] { fit_dz(noz); }) == ErrorKind::NoDoubleZeros);
    const auto zeros = BivariateCountSample::from_pairs({{0, 0}, {0, 0}});
    CHECK(kind_of([&] { fit_dz(zeros); }) == ErrorKind::EstimateOutsideTheta);
}

TEST_CASE("even-points fit")
{
    CHECK(kind_of([&] { fit_pp(four); }) == ErrorKind::EvenPointsUndefined);
    const auto s = BivariateCountSample::from_pairs({{0, 0}, {1, 1}, {2, 2}, {1, 0}});
    const auto f = fit_pp(s);
    CHECK(f.theta_hat.theta3 == Catch::Approx(0.875 + 0.25 * std::log(0.5)).epsilon(1e-14));
    CHECK(f.theta_hat.theta1 == 1.0);
    CHECK(f.theta_hat.theta2 == 0.75);
    const auto zeros = BivariateCountSample::from_pairs({{0, 0}, {0, 0}, {0, 0}});
    CHECK(kind_of([&] { fit_pp(zeros); }) == ErrorKind::EstimateOutsideTheta);
}

TEST_CASE("conditional even-points fit")
{
    const auto s = BivariateCountSample::from_pairs({{0, 0}, {0, 2}, {0, 1}, {3, 1}, {2, 2}});
    CHECK(fit_pc(s).theta_hat.theta3 == Catch::Approx(1.2 + 0.5 * std::log(1.0 / 3.0)).epsilon(1e-14));
    const auto nozero = BivariateCountSample::from_pairs({{1, 0}, {2, 2}, {1, 1}});
    CHECK(kind_of([&] { fit_pc(nozero); }) == ErrorKind::ConditionalEvenPointsUndefined);
    const auto tie = BivariateCountSample::from_pairs({{0, 0}, {0, 1}, {2, 2}, {3, 1}});
    CHECK(kind_of([&] { fit_pc(tie); }) == ErrorKind::ConditionalEvenPointsUndefined);
}

TEST_CASE("closed-form fits keep the sample means")
{
    Rng rng(5);
    const auto s = sample_bpd({1.5, 1, 0.62}, 400, rng);
    for (auto k : {EstimatorKind::ML, EstimatorKind::MM, EstimatorKind::DZ, EstimatorKind::PP, EstimatorKind::PC}) {
        const auto f = fit(k, s);
        CHECK(f.method == k);
        CHECK(f.theta_hat.theta1 == s.mean1());
        CHECK(f.theta_hat.theta2 == s.mean2());
        if (f.converged) {
            CHECK(f.theta_hat.valid(false));
        }
    }
}

TEST_CASE("maximum likelihood")
{
    Rng rng(77);
    const ThetaBP th{1, 1, 0.25};
    const auto s = sample_bpd(th, 5000, rng);
    const auto f = fit_ml(s);
    CHECK(f.converged);
    CHECK(f.iterations <= 25);
    CHECK(std::abs(ml_score(s, f.theta_hat.theta3)) <= 1e-9);
    const double se = std::sqrt(asym_cov(EstimatorKind::ML, th).matrix[2][2] / 5000.0);
    CHECK(std::abs(f.theta_hat.theta3 - 0.25) <= 4 * se);
    const double upper = std::min(s.mean1(), s.mean2());
    CHECK(f.theta_hat.theta3 > 0.0);
    CHECK(f.theta_hat.theta3 < upper);

    // no pair with both counts positive: the score is -1 everywhere
    const auto edge = BivariateCountSample::from_pairs({{0, 1}, {2, 0}, {0, 3}, {1, 0}});
    const auto b = fit_ml(edge);
    CHECK_FALSE(b.converged);
    CHECK(b.theta_hat.theta3 == FitOptions{}.eps);
    CHECK_FALSE(b.diagnostic.empty());
}

TEST_CASE("q factor")
{
    const ThetaBP th{1, 1, 0.5};
    const auto tab = pmf_table(th, 60, 60);
    double brute = 0.0;
    for (long r = 1; r <= 60; ++r) {
        for (long s = 1; s <= 60; ++s) {
            if (tab(r, s) > 0) {
                brute += tab(r - 1, s - 1) * tab(r - 1, s - 1) / tab(r, s);
            }
        }
    }
    CHECK(std::abs(q_factor(th) - brute) < 1e-8);
    // high-precision summation
    CHECK(q_factor(th) == Catch::Approx(2.547870582335671375).epsilon(1e-12));
    CHECK(q_factor({1, 1, 0.25}) == Catch::Approx(2.99978809093851224).epsilon(1e-12));
    CHECK(q_factor({1.5, 1, 0.62}) == Catch::Approx(2.25939394845729007).epsilon(1e-12));
    CHECK(q_factor({2, 1.3, 0.3}) == Catch::Approx(2.26328050383283174).epsilon(1e-12));
    CHECK(std::abs(q_factor(th, 1e-6) - q_factor(th, 1e-10)) < 1e-6);
    CHECK(std::isfinite(q_factor({1, 1, 1e-6})));
}

TEST_CASE("asymptotic covariances")
{
    const ThetaBP th{1, 1, 0.5};
    CHECK(asym_cov(EstimatorKind::MM, th).matrix[2][2] == Catch::Approx(1.75));
    CHECK(asym_cov(EstimatorKind::ML, th).matrix[2][2] == Catch::Approx(0.8512439135603605499).epsilon(1e-10));
    CHECK(dz_moment_cov(th).at(0).at(2) == Catch::Approx(-std::exp(-1.5)).epsilon(1e-14));
    CHECK(dz_moment_cov({1.5, 1, 0.62}).at(0).at(2) == Catch::Approx(-1.5 * std::exp(0.62 - 2.5)).epsilon(1e-14));
    CHECK(asym_cov(EstimatorKind::DZ, th).matrix[2][2] ==
          Catch::Approx(std::exp(1.5) - 1 - 2 + 1.0).epsilon(1e-14));
    CHECK(asym_cov(EstimatorKind::PP, th).matrix[2][2] ==
          Catch::Approx(0.25 * (3 - 2) + (std::exp(4.0) - 1) / 16).epsilon(1e-14));

    for (const auto& t : grid) {
        for (auto k : {EstimatorKind::ML, EstimatorKind::MM, EstimatorKind::DZ, EstimatorKind::PP, EstimatorKind::PC}) {
            const auto c = asym_cov(k, t);
            INFO(t.str() << " " << to_string(k));
            for (int i = 0; i < 3; ++i) {
                CHECK(c.matrix[i][i] > 0);
                for (int j = 0; j < 3; ++j) {
                    CHECK(c.matrix[i][j] == c.matrix[j][i]);
                }
            }
            CHECK(gen_variance(k, t) == Catch::Approx(det3(c.matrix)).epsilon(1e-8));
        }
        const double ratio = gen_variance(EstimatorKind::ML, t) / gen_variance(EstimatorKind::MM, t);
        CHECK(ratio > 0);
        CHECK(ratio <= 1);
        CHECK(pc_moment_gen_variance(t) == Catch::Approx(det3(pc_moment_cov(t))).epsilon(1e-8));
    }
    CHECK(gen_variance(EstimatorKind::MM, th) == Catch::Approx(1.0625).epsilon(1e-14));
    CHECK(gen_variance(EstimatorKind::ML, th) == Catch::Approx(0.38843293517027041).epsilon(1e-10));
    CHECK(gen_variance(EstimatorKind::ML, {1, 1, 0.25}) == Catch::Approx(0.84419723260818141).epsilon(1e-10));
    CHECK(gen_variance(EstimatorKind::ML, {1.5, 1, 0.62}) == Catch::Approx(0.77130256375032796).epsilon(1e-10));
    CHECK(gen_variance(EstimatorKind::ML, {2, 1.3, 0.3}) == Catch::Approx(6.1380435638826478).epsilon(1e-10));
}

TEST_CASE("estimators are consistent at n = 10000")
{
    const ThetaBP th{1, 1, 0.5};
    const int reps = 100;
    for (auto k : {EstimatorKind::ML, EstimatorKind::MM, EstimatorKind::DZ, EstimatorKind::PP, EstimatorKind::PC}) {
        const double se = std::sqrt(asym_cov(k, th).matrix[2][2] / 10000.0);
        int inside = 0;
        for (int i = 0; i < reps; ++i) {
            Rng rng(derive_seed(1234, {static_cast<std::uint64_t>(i)}));
            const auto s = sample_bpd(th, 10000, rng);
            FitOptions o;
            o.clamp = true;
            const auto f = fit(k, s, o);
            inside += std::abs(f.theta_hat.theta3 - 0.5) <= 5 * se;
        }
        INFO(to_string(k));
        CHECK(inside >= 99);
    }
}

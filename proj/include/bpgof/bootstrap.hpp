#pragma once

#include "bpgof/bpd.hpp"
#include "bpgof/estimators.hpp"
#include "bpgof/gof_stats.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace bpgof {

struct BootstrapConfig {
    std::size_t B = 500;
    std::vector<double> alphas{0.05, 0.10};
    EstimatorKind estimator = EstimatorKind::ML;
    std::uint64_t seed = 0;
    unsigned max_workers = 1;
    // fit the original sample in clamp mode instead of failing on an infeasible estimate
    bool clamp_original = false;
};

// a statistic that needs a bootstrap, with its weight when it has one
struct StatSpec {
    StatKind kind = StatKind::W;
    WeightExponents w{};
};

struct GofTestReport {
    StatValue stat;
    WeightExponents w{};
    ThetaBP theta_hat;
    EstimatorKind estimator = EstimatorKind::ML;
    double p_value = 1.0;
    std::vector<double> replicates;
    std::map<double, double> critical_values;
    std::uint64_t seed = 0;
    std::size_t B = 0;
};

// p = #{b : replicate_b >= observed} / B
double bootstrap_pvalue(const std::vector<double>& replicates, double observed);
// ascending order statistic a = floor((1 - alpha) B) + 1, capped at B
double critical_value(std::vector<double> replicates, double alpha);
// order statistic B(1-alpha) when that product is an integer, otherwise the rule above
double critical_value_bracket(std::vector<double> replicates, double alpha);

GofTestReport bootstrap_test(const BivariateCountSample& sample, const StatSpec& stat, const BootstrapConfig& cfg);

// several statistics sharing one set of bootstrap samples; each report equals its single-statistic run
std::vector<GofTestReport> bootstrap_tests(const BivariateCountSample& sample, const std::vector<StatSpec>& stats,
                                           const BootstrapConfig& cfg);

// d-variate W with a moment fit of the shared parameter
struct GofTestReportD {
    double observed = 0.0;
    ThetaDP theta_hat;
    double p_value = 1.0;
    std::vector<double> replicates;
    std::map<double, double> critical_values;
    std::uint64_t seed = 0;
};

ThetaDP fit_dpd_mm(const CountSampleD& sample, double eps = 1e-6);
GofTestReportD bootstrap_test_wd(const CountSampleD& sample, const BootstrapConfig& cfg);

// run body(i) for i in [0, count) on up to workers threads
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

unsigned default_workers() noexcept;

} // namespace bpgof

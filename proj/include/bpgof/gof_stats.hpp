#pragma once

#include "bpgof/bpd.hpp"

#include <cstddef>
#include <optional>
#include <string_view>

namespace bpgof {

// weight w(u) = u1^a1 * u2^a2
struct WeightExponents {
    double a1 = 0.0;
    double a2 = 0.0;

    bool valid() const noexcept;
    void validate() const;
    bool operator==(const WeightExponents&) const = default;
};

enum class StatKind { R, S, W, T, IB, NIB, Wd };

const char* to_string(StatKind kind) noexcept;
// accepts r|s|w|t|ib|nib|wd, case-insensitive; throws std::invalid_argument
StatKind parse_stat(std::string_view name);
// R, S, W and Wd need a bootstrap; T, IB and NIB carry asymptotic p-values
bool needs_bootstrap(StatKind kind) noexcept;

struct StatValue {
    StatKind kind = StatKind::R;
    double value = 0.0;
    std::optional<double> p_value;
    int df = 0;
};

double epgf(double u1, double u2, const BivariateCountSample& sample);
// axis 0 differentiates in u1, axis 1 in u2
double epgf_partial(double u1, double u2, const BivariateCountSample& sample, int axis);

// series form truncated at M + extra in every index
StatValue stat_R(const BivariateCountSample& sample, const ThetaBP& theta_hat, const WeightExponents& w,
                 std::size_t extra = 15);
StatValue stat_S(const BivariateCountSample& sample, const ThetaBP& theta_hat, const WeightExponents& w);
// grid 0..extent in each coordinate; extent defaults to the sample maximum M
StatValue stat_W(const BivariateCountSample& sample, const ThetaBP& theta_hat,
                 std::optional<std::size_t> extent = std::nullopt);
StatValue stat_Wd(const CountSampleD& sample, const ThetaDP& theta_hat);

StatValue stat_T(const BivariateCountSample& sample);
StatValue stat_IB(const BivariateCountSample& sample);
StatValue stat_NIB(const BivariateCountSample& sample);

// dispatch for the bivariate statistics; competitors ignore theta_hat and w
StatValue compute_stat(StatKind kind, const BivariateCountSample& sample, const ThetaBP& theta_hat,
                       const WeightExponents& w);

} // namespace bpgof

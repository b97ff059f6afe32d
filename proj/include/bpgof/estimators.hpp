#pragma once

#include "bpgof/bpd.hpp"

#include <array>
#include <string>
#include <string_view>

namespace bpgof {

enum class EstimatorKind { ML, MM, DZ, PP, PC };

const char* to_string(EstimatorKind kind) noexcept;
// accepts ml|mm|dz|pp|pc, case-insensitive; throws std::invalid_argument
EstimatorKind parse_estimator(std::string_view name);

struct FitOptions {
    double tol = 1e-9;
    int max_iter = 100;
    // map infeasible estimates into (eps, min(mean)-eps) instead of throwing
    bool clamp = false;
    double eps = 1e-6;
};

struct FitResult {
    ThetaBP theta_hat;
    EstimatorKind method = EstimatorKind::MM;
    int iterations = 0;
    bool converged = true;
    std::string diagnostic;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct AsymCov {
    Matrix3 matrix{};
    EstimatorKind method = EstimatorKind::MM;
};

FitResult fit_mm(const BivariateCountSample& sample, const FitOptions& opts = {});
FitResult fit_ml(const BivariateCountSample& sample, const FitOptions& opts = {});
FitResult fit_dz(const BivariateCountSample& sample, const FitOptions& opts = {});
FitResult fit_pp(const BivariateCountSample& sample, const FitOptions& opts = {});
FitResult fit_pc(const BivariateCountSample& sample, const FitOptions& opts = {});
FitResult fit(EstimatorKind kind, const BivariateCountSample& sample, const FitOptions& opts = {});

// mean of f(theta3) = Rbar(theta3) - 1 with theta1, theta2 at the sample means
double ml_score(const BivariateCountSample& sample, double theta3);

double q_factor(const ThetaBP& theta, double tol = 1e-13);

// covariance of the limiting law of sqrt(n)(theta_hat - theta)
AsymCov asym_cov(EstimatorKind kind, const ThetaBP& theta);
// closed-form determinant of asym_cov
double gen_variance(EstimatorKind kind, const ThetaBP& theta);

// limiting covariance of sqrt(n)(mean1, mean2, share of (0,0)) - the double-zero moment vector
Matrix3 dz_moment_cov(const ThetaBP& theta);
// the conditional-even-points matrix in its published C..J parameterization
Matrix3 pc_moment_cov(const ThetaBP& theta);
// closed-form determinant of pc_moment_cov
double pc_moment_gen_variance(const ThetaBP& theta);

double det3(const Matrix3& m) noexcept;

} // namespace bpgof

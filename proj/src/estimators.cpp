#include "bpgof/estimators.hpp"

#include "bpgof/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bpgof {

namespace {

constexpr double kUnderflow = 1e-300;
constexpr std::size_t kQCap = 400;

void require_nonempty(const BivariateCountSample& s)
{
    if (s.empty()) {
        throw std::invalid_argument("estimator: empty sample");
    }
}

// Clamp-mode mapping: -inf -> eps, +inf -> upper, NaN -> moment estimate.
FitResult clamped(const BivariateCountSample& s, double t3, EstimatorKind kind, const FitOptions& o,
                  std::string diag)
{
    const double m1 = std::max(s.mean1(), 2.0 * o.eps);
    const double m2 = std::max(s.mean2(), 2.0 * o.eps);
    const double hi = std::max(std::min(m1, m2) - o.eps, o.eps);
    if (std::isnan(t3)) {
        t3 = s.cov(0);
    }
    if (std::isnan(t3)) {
        t3 = o.eps;
    }
    FitResult r;
    r.theta_hat = {m1, m2, std::clamp(t3, o.eps, hi)};
    r.method = kind;
    r.converged = false;
    r.diagnostic = std::move(diag);
    return r;
}

FitResult finish(const BivariateCountSample& s, double t3, EstimatorKind kind, const FitOptions& o)
{
    const ThetaBP th{s.mean1(), s.mean2(), t3};
    if (th.valid(false)) {
        FitResult r;
        r.theta_hat = th;
        r.method = kind;
        return r;
    }
    std::string msg = std::string(to_string(kind)) + " estimate " + th.str() + " lies outside the parameter space";
    if (!o.clamp) {
        throw StatError(ErrorKind::EstimateOutsideTheta, msg);
    }
    return clamped(s, t3, kind, o, msg);
}

struct ScoreValue {
    double f;
    double df;
};

// f(t3) = Rbar - 1 and its t3-derivative, theta1 and theta2 held at m1, m2
ScoreValue ml_eval(const BivariateCountSample& s, double m1, double m2, double t3)
{
    const PmfTable tab({m1, m2, t3}, s.max1(), s.max2());
    double acc = 0.0, dacc = 0.0;
    for (const auto& c : s.cells()) {
        if (c.r == 0 || c.s == 0) {
            continue;
        }
        const long r = c.r, q = c.s;
        const double p = tab(r, q);
        const double pm = tab(r - 1, q - 1);
        const double w = static_cast<double>(c.count);
        if (p < kUnderflow) {
            if (pm > 0.0) {
                acc = std::numeric_limits<double>::infinity();
                dacc = std::numeric_limits<double>::quiet_NaN();
            }
            continue;
        }
        const double dp = pm - tab(r - 1, q) - tab(r, q - 1) + p;
        const double dpm = tab(r - 2, q - 2) - tab(r - 2, q - 1) - tab(r - 1, q - 2) + pm;
        const double ratio = pm / p;
        acc += w * ratio;
        dacc += w * (dpm - ratio * dp) / p;
    }
    const double n = static_cast<double>(s.n());
    return {acc / n - 1.0, dacc / n};
}

} // namespace

const char* to_string(EstimatorKind kind) noexcept
{
    switch (kind) {
    case EstimatorKind::ML: return "ML";
    case EstimatorKind::MM: return "MM";
    case EstimatorKind::DZ: return "DZ";
    case EstimatorKind::PP: return "PP";
    case EstimatorKind::PC: return "PC";
    }
    return "?";
}

EstimatorKind parse_estimator(std::string_view name)
{
    std::string k(name);
    std::transform(k.begin(), k.end(), k.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (k == "ml" || k == "mv") return EstimatorKind::ML;
    if (k == "mm") return EstimatorKind::MM;
    if (k == "dz" || k == "dc") return EstimatorKind::DZ;
    if (k == "pp") return EstimatorKind::PP;
    if (k == "pc") return EstimatorKind::PC;
    throw std::invalid_argument("unknown estimator '" + std::string(name) + "' (expected ml, mm, dz, pp or pc)");
}

FitResult fit_mm(const BivariateCountSample& sample, const FitOptions& opts)
{
    require_nonempty(sample);
    return finish(sample, sample.cov(0), EstimatorKind::MM, opts);
}

FitResult fit_dz(const BivariateCountSample& sample, const FitOptions& opts)
{
    require_nonempty(sample);
    const double phi = sample.pn(0, 0);
    if (phi == 0.0) {
        if (!opts.clamp) {
            throw StatError(ErrorKind::NoDoubleZeros, "double-zero estimator undefined: no (0,0) pairs");
        }
        return clamped(sample, -std::numeric_limits<double>::infinity(), EstimatorKind::DZ, opts,
                       "no (0,0) pairs");
    }
    return finish(sample, sample.mean1() + sample.mean2() + std::log(phi), EstimatorKind::DZ, opts);
}

FitResult fit_pp(const BivariateCountSample& sample, const FitOptions& opts)
{
    require_nonempty(sample);
    std::size_t a = 0;
    for (std::size_t i = 0; i < sample.n(); ++i) {
        a += ((sample.x1()[i] ^ sample.x2()[i]) & 1u) == 0;
    }
    const double n = static_cast<double>(sample.n());
    const double arg = 2.0 * static_cast<double>(a) / n - 1.0;
    const double t3 = 0.5 * (sample.mean1() + sample.mean2()) + 0.25 * std::log(arg);
    if (2 * a <= sample.n()) {
        if (!opts.clamp) {
            throw StatError(ErrorKind::EvenPointsUndefined,
                            "even-points estimator undefined: same-parity pairs do not exceed n/2");
        }
        return clamped(sample, arg == 0.0 ? -std::numeric_limits<double>::infinity() : t3, EstimatorKind::PP,
                       opts, "same-parity pairs do not exceed n/2");
    }
    return finish(sample, t3, EstimatorKind::PP, opts);
}

FitResult fit_pc(const BivariateCountSample& sample, const FitOptions& opts)
{
    require_nonempty(sample);
    std::size_t a = 0, b = 0;
    for (std::size_t i = 0; i < sample.n(); ++i) {
        if (sample.x1()[i] == 0) {
            ((sample.x2()[i] & 1u) == 0 ? a : b) += 1;
        }
    }
    const double arg = 2.0 * static_cast<double>(a) / static_cast<double>(a + b) - 1.0;
    const double t3 = sample.mean2() + 0.5 * std::log(arg);
    if (a <= b) {
        if (!opts.clamp) {
            throw StatError(ErrorKind::ConditionalEvenPointsUndefined,
                            "conditional even-points estimator undefined: need more (0,even) than (0,odd) pairs");
        }
        const double raw = (a + b > 0 && a == b) ? -std::numeric_limits<double>::infinity()
                                                 : std::numeric_limits<double>::quiet_NaN();
        return clamped(sample, raw, EstimatorKind::PC, opts, "(0,even) pairs do not exceed (0,odd) pairs");
    }
    return finish(sample, t3, EstimatorKind::PC, opts);
}

double ml_score(const BivariateCountSample& sample, double theta3)
{
    require_nonempty(sample);
    return ml_eval(sample, sample.mean1(), sample.mean2(), theta3).f;
}

FitResult fit_ml(const BivariateCountSample& sample, const FitOptions& opts)
{
    require_nonempty(sample);
    double m1 = sample.mean1();
    double m2 = sample.mean2();
    if (opts.clamp) {
        m1 = std::max(m1, 2.0 * opts.eps);
        m2 = std::max(m2, 2.0 * opts.eps);
    }
    const double lo = opts.eps;
    const double hi = std::min(m1, m2) - opts.eps;

    FitResult res;
    res.method = EstimatorKind::ML;
    if (!(hi > lo)) {
        if (!opts.clamp) {
            throw StatError(ErrorKind::EstimateOutsideTheta,
                            "ML estimator undefined: sample means too small for a feasible theta3");
        }
        res.theta_hat = {m1, m2, lo};
        res.converged = false;
        res.diagnostic = "empty bracket";
        return res;
    }

    const double f_lo = ml_eval(sample, m1, m2, lo).f;
    const double f_hi = ml_eval(sample, m1, m2, hi).f;
    if (!(f_lo > 0.0 && f_hi < 0.0) && !(f_lo < 0.0 && f_hi > 0.0)) {
        res.converged = std::fabs(f_lo) <= opts.tol || std::fabs(f_hi) <= opts.tol;
        double t3 = f_lo < 0.0 || std::isnan(f_lo) ? lo : hi;
        if (std::fabs(f_lo) <= opts.tol) t3 = lo;
        else if (std::fabs(f_hi) <= opts.tol) t3 = hi;
        res.theta_hat = {m1, m2, t3};
        if (!res.converged) {
            res.diagnostic = to_string(ErrorKind::NoInteriorRoot);
        }
        return res;
    }

    // xl keeps f < 0, xh keeps f > 0
    double xl = f_lo < 0.0 ? lo : hi;
    double xh = f_lo < 0.0 ? hi : lo;
    double x = std::clamp(sample.cov(0), lo, hi);
    res.converged = false;
    for (int it = 1; it <= opts.max_iter; ++it) {
        res.iterations = it;
        const auto [f, df] = ml_eval(sample, m1, m2, x);
        if (std::fabs(f) <= opts.tol) {
            res.converged = true;
            break;
        }
        if (f < 0.0) {
            xl = x;
        } else {
            xh = x;
        }
        const double a = std::min(xl, xh), b = std::max(xl, xh);
        double next = x - f / df;
        if (!std::isfinite(next) || next <= a || next >= b) {
            next = 0.5 * (a + b);
        }
        if (std::fabs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x)) {
            x = next;
            res.converged = true;
            break;
        }
        x = next;
    }
    if (!res.converged) {
        res.diagnostic = to_string(ErrorKind::MaxIterations);
    }
    res.theta_hat = {m1, m2, x};
    return res;
}

FitResult fit(EstimatorKind kind, const BivariateCountSample& sample, const FitOptions& opts)
{
    switch (kind) {
    case EstimatorKind::ML: return fit_ml(sample, opts);
    case EstimatorKind::MM: return fit_mm(sample, opts);
    case EstimatorKind::DZ: return fit_dz(sample, opts);
    case EstimatorKind::PP: return fit_pp(sample, opts);
    case EstimatorKind::PC: return fit_pc(sample, opts);
    }
    throw std::invalid_argument("unknown estimator kind");
}

double q_factor(const ThetaBP& theta, double tol)
{
    theta.validate();
    if (!(tol > 0.0)) {
        throw std::invalid_argument("q_factor: tol must be positive");
    }
    const double tmax = std::max(theta.theta1, theta.theta2);
    const std::size_t k_min = static_cast<std::size_t>(std::ceil(tmax + 6.0 * std::sqrt(tmax))) + 5;

    std::size_t size = std::min<std::size_t>(std::max<std::size_t>(2 * k_min, 64), kQCap);
    PmfTable tab(theta, size, size);
    double q = 0.0;
    for (std::size_t k = 1; k <= kQCap; ++k) {
        if (k > size) {
            size = std::min(2 * size, kQCap);
            tab = PmfTable(theta, size, size);
        }
        // shell max(r,s) == k with r,s >= 1
        double shell = 0.0;
        const long lk = static_cast<long>(k);
        for (long j = 1; j <= lk; ++j) {
            const std::pair<long, long> cellsk[2] = {{lk, j}, {j, lk}};
            const int m = (j == lk) ? 1 : 2;
            for (int c = 0; c < m; ++c) {
                const auto [r, s] = cellsk[c];
                const double p = tab(r, s);
                const double pm = tab(r - 1, s - 1);
                if (pm == 0.0) {
                    continue;
                }
                if (p < kUnderflow) {
                    throw StatError(ErrorKind::NonConvergence,
                                    "q_factor: pmf underflow before the series converged");
                }
                shell += pm * pm / p;
            }
        }
        q += shell;
        if (k >= k_min && shell < tol) {
            return q;
        }
    }
    throw StatError(ErrorKind::NonConvergence, "q_factor: grid cap reached before convergence");
}

AsymCov asym_cov(EstimatorKind kind, const ThetaBP& theta)
{
    theta.validate();
    const double t1 = theta.theta1, t2 = theta.theta2, t3 = theta.theta3;
    double c = 0.0;
    switch (kind) {
    case EstimatorKind::ML: {
        const double q1 = q_factor(theta) - 1.0;
        c = (t3 * t3 * (t1 + t2 - 2.0 * t3) * q1 - t3 * t3 + (t1 - 2.0 * t3) * (t2 - 2.0 * t3)) /
            ((t1 * t2 - t3 * t3) * q1 - t1 - t2 + 2.0 * t3);
        break;
    }
    case EstimatorKind::MM:
        c = t1 * t2 + t3 + t3 * t3;
        break;
    case EstimatorKind::DZ:
        c = std::exp(t1 + t2 - t3) - 1.0 - t1 - t2 + 2.0 * t3;
        break;
    case EstimatorKind::PP:
        c = 0.25 * (6.0 * t3 - t1 - t2) + (std::exp(4.0 * (t1 + t2 - 2.0 * t3)) - 1.0) / 16.0;
        break;
    case EstimatorKind::PC: {
        const double alpha = std::exp(-t1);
        const double beta = std::exp(2.0 * (t3 - t2));
        c = 2.0 * t3 - t2 + (1.0 / (beta * beta) - 1.0) / (4.0 * alpha);
        break;
    }
    }
    AsymCov out;
    out.method = kind;
    out.matrix = {{{t1, t3, t3}, {t3, t2, t3}, {t3, t3, c}}};
    return out;
}

double gen_variance(EstimatorKind kind, const ThetaBP& theta)
{
    theta.validate();
    const double t1 = theta.theta1, t2 = theta.theta2, t3 = theta.theta3;
    const double l1 = t1 - t3, l2 = t2 - t3;
    const double g = t1 * t2 - t3 * t3;
    switch (kind) {
    case EstimatorKind::ML: {
        const double q1 = q_factor(theta) - 1.0;
        return l1 * l1 * l2 * l2 / (g * q1 - t1 - t2 + 2.0 * t3);
    }
    case EstimatorKind::MM:
        return t1 * t1 * t2 * t2 + t1 * t2 * t3 - (t1 + t2) * t3 * t3 + t3 * t3 * t3 - t3 * t3 * t3 * t3;
    case EstimatorKind::DZ:
        return g * (std::exp(t1 + t2 - t3) - 1.0) - t1 * t2 * (t1 + t2 - 2.0 * t3);
    case EstimatorKind::PP:
        return (g * (std::exp(4.0 * (t1 + t2 - 2.0 * t3)) - 1.0) +
                4.0 * (2.0 * t3 * l1 * l2 - t1 * l2 * l2 - t2 * l1 * l1)) /
               16.0;
    case EstimatorKind::PC:
        return det3(asym_cov(kind, theta).matrix);
    }
    throw std::invalid_argument("unknown estimator kind");
}

Matrix3 dz_moment_cov(const ThetaBP& theta)
{
    theta.validate();
    const double t1 = theta.theta1, t2 = theta.theta2, t3 = theta.theta3;
    const double phi = std::exp(t3 - t1 - t2);
    return {{{t1, t3, -t1 * phi}, {t3, t2, -t2 * phi}, {-t1 * phi, -t2 * phi, phi * (1.0 - phi)}}};
}

namespace {

struct PcTerms {
    double c, d, e, f, g, h, j;
};

PcTerms pc_terms(const ThetaBP& theta)
{
    const double t1 = theta.theta1, t2 = theta.theta2, t3 = theta.theta3;
    const double a = std::exp(-t1);
    const double b = std::exp(2.0 * (t3 - t2));
    PcTerms p{};
    p.c = a * (b + 1.0) * (2.0 + a * (b + 1.0));
    p.d = a * a * (b * b - 1.0);
    p.h = (b + 1.0) * (t3 * (1.0 / b + 1.0) - 2.0 * t2);
    p.e = (p.d * (t1 + a * a * b) + 2.0 * t3 * a * a * (b + 1.0) - a * a * b * p.h) / (a * a * b);
    p.f = a * (1.0 - b) * (2.0 + a * (b - 1.0));
    p.g = t1 * (b - 1.0) * (b - 1.0) / b;
    p.j = (t1 * (b - 1.0) * (b - 1.0) + 2.0 * t3 * (b * b - 1.0) + t2 * (b + 1.0) * (b + 1.0)) / (a * a * b * b);
    return p;
}

} // namespace

Matrix3 pc_moment_cov(const ThetaBP& theta)
{
    theta.validate();
    const auto p = pc_terms(theta);
    const double fgh = p.f - p.g + p.h;
    return {{{p.c / 4.0, p.d / 4.0, p.e / 4.0},
             {p.d / 4.0, p.f / 4.0, fgh / 4.0},
             {p.e / 4.0, fgh / 4.0, (p.f + 2.0 * (p.h - p.g) + p.j) / 4.0}}};
}

double pc_moment_gen_variance(const ThetaBP& theta)
{
    theta.validate();
    const auto p = pc_terms(theta);
    const double gh = p.g - p.h;
    return (p.f * (p.c * p.j + p.e * (2.0 * p.d - p.e)) - gh * (2.0 * p.d * (p.e - p.d) + p.c * gh) -
            p.d * p.d * (p.f + p.j)) /
           64.0;
}

double det3(const Matrix3& m) noexcept
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

} // namespace bpgof

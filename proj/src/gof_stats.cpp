#include "bpgof/gof_stats.hpp"

#include "bpgof/errors.hpp"
#include "bpgof/special.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace bpgof {

namespace {

constexpr std::size_t kMaxGridCells = std::size_t{1} << 26;

void require_nonempty(const BivariateCountSample& s)
{
    if (s.empty()) {
        throw std::invalid_argument("statistic: empty sample");
    }
}

// one (i,j) summand of the S closed form for a single partial derivative.
// xa, xb are the differentiated coordinates; ya, yb the other ones.
double s_pair_term(double xa, double xb, double ya, double yb, double lam, double t3, double a_own,
                   double a_other)
{
    const double x = xa + xb + a_own;
    const double y = ya + yb + a_other;
    double v = lam * lam / ((x + 1.0) * (y + 1.0)) + 2.0 * t3 * lam / ((x + 1.0) * (y + 2.0)) +
               t3 * t3 / ((x + 1.0) * (y + 3.0));
    if (xa != 0.0 && xb != 0.0) {
        v += xa * xb / ((x - 1.0) * (y + 1.0));
    }
    const double sx = xa + xb;
    if (sx != 0.0) {
        v -= sx * (lam / (x * (y + 1.0)) + t3 / (x * (y + 2.0)));
    }
    return v;
}

// dense empirical pmf on [0, side)^2, zero outside the support
std::vector<double> dense_pn(const BivariateCountSample& s, std::size_t side)
{
    std::vector<double> p(side * side, 0.0);
    const double n = static_cast<double>(s.n());
    for (const auto& c : s.cells()) {
        if (c.r < side && c.s < side) {
            p[c.r * side + c.s] = static_cast<double>(c.count) / n;
        }
    }
    return p;
}

struct Moments2 {
    double m1, m2, v1, v2, c12;
};

} // namespace

bool WeightExponents::valid() const noexcept
{
    return std::isfinite(a1) && std::isfinite(a2) && a1 > -1.0 && a2 > -1.0;
}

void WeightExponents::validate() const
{
    if (!valid()) {
        throw std::invalid_argument("weight exponents must satisfy a1 > -1 and a2 > -1");
    }
}

const char* to_string(StatKind kind) noexcept
{
    switch (kind) {
    case StatKind::R: return "R";
    case StatKind::S: return "S";
    case StatKind::W: return "W";
    case StatKind::T: return "T";
    case StatKind::IB: return "IB";
    case StatKind::NIB: return "NIB";
    case StatKind::Wd: return "Wd";
    }
    return "?";
}

StatKind parse_stat(std::string_view name)
{
    std::string k(name);
    std::transform(k.begin(), k.end(), k.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (k == "r") return StatKind::R;
    if (k == "s") return StatKind::S;
    if (k == "w") return StatKind::W;
    if (k == "t") return StatKind::T;
    if (k == "ib") return StatKind::IB;
    if (k == "nib") return StatKind::NIB;
    if (k == "wd") return StatKind::Wd;
    throw std::invalid_argument("unknown statistic '" + std::string(name) + "' (expected r, s, w, t, ib, nib or wd)");
}

bool needs_bootstrap(StatKind kind) noexcept
{
    return kind == StatKind::R || kind == StatKind::S || kind == StatKind::W || kind == StatKind::Wd;
}

double epgf(double u1, double u2, const BivariateCountSample& sample)
{
    require_nonempty(sample);
    double acc = 0.0;
    for (const auto& c : sample.cells()) {
        acc += static_cast<double>(c.count) * std::pow(u1, c.r) * std::pow(u2, c.s);
    }
    return acc / static_cast<double>(sample.n());
}

double epgf_partial(double u1, double u2, const BivariateCountSample& sample, int axis)
{
    require_nonempty(sample);
    if (axis != 0 && axis != 1) {
        throw std::invalid_argument("epgf_partial: axis must be 0 or 1");
    }
    double acc = 0.0;
    for (const auto& c : sample.cells()) {
        const std::uint32_t k = axis == 0 ? c.r : c.s;
        if (k == 0) {
            continue;
        }
        const double t = axis == 0 ? std::pow(u1, c.r - 1) * std::pow(u2, c.s) : std::pow(u1, c.r) * std::pow(u2, c.s - 1);
        acc += static_cast<double>(c.count) * k * t;
    }
    return acc / static_cast<double>(sample.n());
}

StatValue stat_R(const BivariateCountSample& sample, const ThetaBP& theta_hat, const WeightExponents& w,
                 std::size_t extra)
{
    require_nonempty(sample);
    theta_hat.validate();
    w.validate();
    const std::size_t g = std::size_t{sample.max_count()} + extra + 1;
    if (g > 2048) {
        throw std::invalid_argument("stat_R: counts too large for the series grid");
    }
    const PmfTable ph(theta_hat, g - 1, g - 1);
    std::vector<double> delta = dense_pn(sample, g);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            delta[i * g + j] -= ph(static_cast<long>(i), static_cast<long>(j));
        }
    }

    const std::size_t h = 2 * g - 1;
    std::vector<double> conv(h * h, 0.0);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            const double dij = delta[i * g + j];
            for (std::size_t k = 0; k < g; ++k) {
                double* row = &conv[(i + k) * h + j];
                const double* src = &delta[k * g];
                for (std::size_t l = 0; l < g; ++l) {
                    row[l] += dij * src[l];
                }
            }
        }
    }

    std::vector<double> w2(h);
    for (std::size_t v = 0; v < h; ++v) {
        w2[v] = 1.0 / (static_cast<double>(v) + w.a2 + 1.0);
    }
    double acc = 0.0;
    for (std::size_t u = 0; u < h; ++u) {
        double row = 0.0;
        for (std::size_t v = 0; v < h; ++v) {
            row += conv[u * h + v] * w2[v];
        }
        acc += row / (static_cast<double>(u) + w.a1 + 1.0);
    }
    StatValue out;
    out.kind = StatKind::R;
    out.value = std::max(0.0, static_cast<double>(sample.n()) * acc);
    return out;
}

StatValue stat_S(const BivariateCountSample& sample, const ThetaBP& theta_hat, const WeightExponents& w)
{
    require_nonempty(sample);
    theta_hat.validate();
    w.validate();
    const double l1 = theta_hat.lambda1();
    const double l2 = theta_hat.lambda2();
    const double t3 = theta_hat.theta3;
    const auto x1 = sample.x1();
    const auto x2 = sample.x2();
    const std::size_t n = sample.n();

    auto pair_value = [&](std::size_t i, std::size_t j) {
        const double a1i = x1[i], a1j = x1[j], a2i = x2[i], a2j = x2[j];
        return s_pair_term(a1i, a1j, a2i, a2j, l1, t3, w.a1, w.a2) +
               s_pair_term(a2i, a2j, a1i, a1j, l2, t3, w.a2, w.a1);
    };

    double diag = 0.0, off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diag += pair_value(i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            off += pair_value(i, j);
        }
    }
    StatValue out;
    out.kind = StatKind::S;
    out.value = std::max(0.0, (diag + 2.0 * off) / static_cast<double>(n));
    return out;
}

StatValue stat_W(const BivariateCountSample& sample, const ThetaBP& theta_hat, std::optional<std::size_t> extent)
{
    require_nonempty(sample);
    theta_hat.validate();
    const std::size_t e = extent.value_or(sample.max_count());
    const std::size_t side = e + 2;
    if (side > 1 << 13) {
        throw std::invalid_argument("stat_W: grid extent too large");
    }
    const std::vector<double> p = dense_pn(sample, side);
    auto at = [&](std::size_t r, std::size_t s) { return p[r * side + s]; };
    const double l1 = theta_hat.lambda1();
    const double l2 = theta_hat.lambda2();
    const double t3 = theta_hat.theta3;

    double acc = 0.0;
    for (std::size_t r = 0; r <= e; ++r) {
        for (std::size_t s = 0; s <= e; ++s) {
            const double d1 = (r + 1.0) * at(r + 1, s) - l1 * at(r, s) - t3 * (s > 0 ? at(r, s - 1) : 0.0);
            const double d2 = (s + 1.0) * at(r, s + 1) - l2 * at(r, s) - t3 * (r > 0 ? at(r - 1, s) : 0.0);
            double cell = 0.0;
            cell += d1 * d1;
            cell += d2 * d2;
            acc += cell;
        }
    }
    StatValue out;
    out.kind = StatKind::W;
    out.value = acc;
    return out;
}

StatValue stat_Wd(const CountSampleD& sample, const ThetaDP& theta_hat)
{
    theta_hat.validate();
    const std::size_t d = sample.dim();
    if (d != theta_hat.dim()) {
        throw std::invalid_argument("stat_Wd: sample dimension does not match theta");
    }
    if (sample.n() == 0) {
        throw std::invalid_argument("statistic: empty sample");
    }
    const std::size_t e = sample.max_count();
    const std::size_t side = e + 2;
    std::vector<std::size_t> stride(d);
    std::size_t cells = 1;
    for (std::size_t k = d; k-- > 0;) {
        stride[k] = cells;
        if (cells > kMaxGridCells / side) {
            throw std::invalid_argument("stat_Wd: grid too large");
        }
        cells *= side;
    }

    std::vector<std::size_t> counts(cells, 0);
    for (std::size_t i = 0; i < sample.n(); ++i) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < d; ++k) {
            idx += sample.at(i, k) * stride[k];
        }
        ++counts[idx];
    }
    const double n = static_cast<double>(sample.n());
    std::vector<double> p(cells, 0.0);
    for (std::size_t c = 0; c < cells; ++c) {
        if (counts[c] != 0) {
            p[c] = static_cast<double>(counts[c]) / n;
        }
    }

    const double ts = theta_hat.theta_shared;
    std::vector<std::size_t> r(d, 0);
    double acc = 0.0;
    for (;;) {
        std::size_t idx = 0;
        bool any_zero = false;
        for (std::size_t k = 0; k < d; ++k) {
            idx += r[k] * stride[k];
        }
        double cell = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            // shift every coordinate except i down by one
            double shifted = 0.0;
            any_zero = false;
            std::size_t sidx = idx;
            for (std::size_t k = 0; k < d; ++k) {
                if (k == i) continue;
                if (r[k] == 0) {
                    any_zero = true;
                    break;
                }
                sidx -= stride[k];
            }
            if (!any_zero) {
                shifted = p[sidx];
            }
            const double b = (r[i] + 1.0) * p[idx + stride[i]] - (theta_hat.thetas[i] - ts) * p[idx] - ts * shifted;
            cell += b * b;
        }
        acc += cell;

        std::size_t k = d;
        while (k-- > 0) {
            if (++r[k] <= e) break;
            r[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
    }
    StatValue out;
    out.kind = StatKind::Wd;
    out.value = acc;
    return out;
}

namespace {

Moments2 sample_moments(const BivariateCountSample& s, int var_ddof)
{
    return {s.mean1(), s.mean2(), s.var1(var_ddof), s.var2(var_ddof), s.cov(0)};
}

} // namespace

StatValue stat_T(const BivariateCountSample& sample)
{
    if (sample.n() < 3) {
        throw std::invalid_argument("stat_T: needs at least 3 observations");
    }
    const auto m = sample_moments(sample, 1);
    const double z1 = m.v1 - m.m1;
    const double z2 = m.v2 - m.m2;
    const double c2 = m.c12 * m.c12;
    const double den = m.m1 * m.m1 * m.m2 * m.m2 - c2 * c2;
    if (den == 0.0 || !std::isfinite(den)) {
        throw StatError(ErrorKind::DegenerateDenominator, "T statistic: degenerate denominator");
    }
    const double num = m.m2 * m.m2 * z1 * z1 - 2.0 * c2 * z1 * z2 + m.m1 * m.m1 * z2 * z2;
    StatValue out;
    out.kind = StatKind::T;
    out.value = static_cast<double>(sample.n()) / 2.0 * num / den;
    out.df = 2;
    out.p_value = chi2_sf(out.value, 2.0);
    return out;
}

StatValue stat_IB(const BivariateCountSample& sample)
{
    if (sample.n() < 2) {
        throw std::invalid_argument("stat_IB: needs at least 2 observations");
    }
    const auto m = sample_moments(sample, 0);
    const double den = m.m1 * m.m2 - m.c12 * m.c12;
    if (den == 0.0 || !std::isfinite(den)) {
        throw StatError(ErrorKind::DegenerateDenominator, "I_B statistic: degenerate denominator");
    }
    const double n = static_cast<double>(sample.n());
    StatValue out;
    out.kind = StatKind::IB;
    out.value = n * (m.m2 * m.v1 - 2.0 * m.c12 * m.c12 + m.m1 * m.v2) / den;
    out.df = static_cast<int>(2 * sample.n() - 3);
    out.p_value = chi2_sf(out.value, out.df);
    return out;
}

StatValue stat_NIB(const BivariateCountSample& sample)
{
    if (sample.n() < 2) {
        throw std::invalid_argument("stat_NIB: needs at least 2 observations");
    }
    const auto m = sample_moments(sample, 0);
    if (m.m1 <= 0.0 || m.m2 <= 0.0 || m.v1 <= 0.0 || m.v2 <= 0.0) {
        throw StatError(ErrorKind::DegenerateDenominator, "NI_B statistic: zero mean or variance");
    }
    const double r2 = m.c12 * m.c12 / (m.v1 * m.v2);
    if (r2 >= 1.0) {
        throw StatError(ErrorKind::PerfectCorrelation, "NI_B statistic: sample correlation is +-1");
    }
    const double n = static_cast<double>(sample.n());
    StatValue out;
    out.kind = StatKind::NIB;
    out.value = n / (1.0 - r2) *
                (m.v1 / m.m1 - 2.0 * r2 * std::sqrt(m.v1 * m.v2 / (m.m1 * m.m2)) + m.v2 / m.m2);
    out.df = static_cast<int>(2 * sample.n() - 3);
    out.p_value = chi2_sf(out.value, out.df);
    return out;
}

StatValue compute_stat(StatKind kind, const BivariateCountSample& sample, const ThetaBP& theta_hat,
                       const WeightExponents& w)
{
    switch (kind) {
    case StatKind::R: return stat_R(sample, theta_hat, w);
    case StatKind::S: return stat_S(sample, theta_hat, w);
    case StatKind::W: return stat_W(sample, theta_hat);
    case StatKind::T: return stat_T(sample);
    case StatKind::IB: return stat_IB(sample);
    case StatKind::NIB: return stat_NIB(sample);
    case StatKind::Wd: {
        auto sd = CountSampleD::from_bivariate(sample);
        ThetaDP td{{theta_hat.theta1, theta_hat.theta2}, theta_hat.theta3};
        return stat_Wd(sd, td);
    }
    }
    throw std::invalid_argument("unknown statistic kind");
}

} // namespace bpgof

#include "bpgof/bpd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace bpgof {

namespace {

constexpr std::size_t kDenseCellCap = std::size_t{1} << 24;

// k*log(x) with 0^0 = 1
double xlogy(unsigned k, double x)
{
    if (k == 0) {
        return 0.0;
    }
    return static_cast<double>(k) * std::log(x);
}

} // namespace

bool ThetaBP::valid(bool allow_independent) const noexcept
{
    if (!std::isfinite(theta1) || !std::isfinite(theta2) || !std::isfinite(theta3)) {
        return false;
    }
    if (theta3 < 0.0 || (!allow_independent && theta3 == 0.0)) {
        return false;
    }
    return theta1 > theta3 && theta2 > theta3;
}

void ThetaBP::validate(bool allow_independent) const
{
    if (!valid(allow_independent)) {
        throw std::invalid_argument("invalid theta " + str() +
                                    ": need theta1 > theta3, theta2 > theta3, theta3 >= 0");
    }
}

std::string ThetaBP::str() const
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.17g, %.17g, %.17g)", theta1, theta2, theta3);
    return buf;
}

bool ThetaDP::valid() const noexcept
{
    if (thetas.size() < 2 || !std::isfinite(theta_shared) || theta_shared < 0.0) {
        return false;
    }
    return std::all_of(thetas.begin(), thetas.end(),
                       [&](double t) { return std::isfinite(t) && t > theta_shared; });
}

void ThetaDP::validate() const
{
    if (!valid()) {
        throw std::invalid_argument("invalid d-variate theta: need d >= 2 and thetas[i] > theta_shared >= 0");
    }
}

BivariateCountSample::BivariateCountSample(std::vector<std::uint32_t> x1, std::vector<std::uint32_t> x2)
    : x1_(std::move(x1)), x2_(std::move(x2))
{
    if (x1_.size() != x2_.size()) {
        throw std::invalid_argument("sample columns differ in length");
    }
    summarize();
}

BivariateCountSample BivariateCountSample::from_pairs(
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs)
{
    std::vector<std::uint32_t> a, b;
    a.reserve(pairs.size());
    b.reserve(pairs.size());
    for (const auto& [u, v] : pairs) {
        a.push_back(u);
        b.push_back(v);
    }
    return BivariateCountSample(std::move(a), std::move(b));
}

void BivariateCountSample::summarize()
{
    const std::size_t n = x1_.size();
    if (n == 0) {
        return;
    }
    double s1 = 0.0, s2 = 0.0;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> tally;
    for (std::size_t i = 0; i < n; ++i) {
        s1 += x1_[i];
        s2 += x2_[i];
        max1_ = std::max(max1_, x1_[i]);
        max2_ = std::max(max2_, x2_[i]);
        ++tally[{x1_[i], x2_[i]}];
    }
    max_ = std::max(max1_, max2_);
    mean1_ = s1 / static_cast<double>(n);
    mean2_ = s2 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d1 = x1_[i] - mean1_;
        const double d2 = x2_[i] - mean2_;
        ss1_ += d1 * d1;
        ss2_ += d2 * d2;
        ss12_ += d1 * d2;
    }
    cells_.reserve(tally.size());
    for (const auto& [rs, c] : tally) {
        cells_.push_back({rs.first, rs.second, c});
    }
    const std::size_t cols = std::size_t{max2_} + 1;
    const std::size_t rows = std::size_t{max1_} + 1;
    if (rows <= kDenseCellCap / cols) {
        counts_.assign(rows * cols, 0);
        for (const auto& c : cells_) {
            counts_[c.r * cols + c.s] = c.count;
        }
    }
}

double BivariateCountSample::var1(int ddof) const
{
    return ss1_ / (static_cast<double>(n()) - ddof);
}

double BivariateCountSample::var2(int ddof) const
{
    return ss2_ / (static_cast<double>(n()) - ddof);
}

double BivariateCountSample::cov(int ddof) const
{
    return ss12_ / (static_cast<double>(n()) - ddof);
}

std::size_t BivariateCountSample::count(long r, long s) const noexcept
{
    if (r < 0 || s < 0 || empty() || r > static_cast<long>(max1_) || s > static_cast<long>(max2_)) {
        return 0;
    }
    if (!counts_.empty()) {
        return counts_[static_cast<std::size_t>(r) * (std::size_t{max2_} + 1) + static_cast<std::size_t>(s)];
    }
    auto it = std::lower_bound(cells_.begin(), cells_.end(), std::pair<long, long>{r, s},
                               [](const Cell& c, const std::pair<long, long>& key) {
                                   return std::pair<long, long>{c.r, c.s} < key;
                               });
    if (it != cells_.end() && it->r == r && it->s == s) {
        return it->count;
    }
    return 0;
}

double BivariateCountSample::pn(long r, long s) const noexcept
{
    if (empty()) {
        return 0.0;
    }
    return static_cast<double>(count(r, s)) / static_cast<double>(n());
}

CountSampleD::CountSampleD(std::size_t d, std::vector<std::uint32_t> data)
    : d_(d), data_(std::move(data))
{
    if (d_ == 0 || data_.size() % d_ != 0) {
        throw std::invalid_argument("d-variate sample: data length is not a multiple of d");
    }
}

std::uint32_t CountSampleD::max_count() const noexcept
{
    return data_.empty() ? 0 : *std::max_element(data_.begin(), data_.end());
}

double CountSampleD::mean(std::size_t k) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < n(); ++i) {
        s += at(i, k);
    }
    return s / static_cast<double>(n());
}

double CountSampleD::cov(std::size_t k, std::size_t l) const
{
    const double mk = mean(k);
    const double ml = mean(l);
    double s = 0.0;
    for (std::size_t i = 0; i < n(); ++i) {
        s += (at(i, k) - mk) * (at(i, l) - ml);
    }
    return s / static_cast<double>(n());
}

CountSampleD CountSampleD::from_bivariate(const BivariateCountSample& s)
{
    std::vector<std::uint32_t> data;
    data.reserve(2 * s.n());
    for (std::size_t i = 0; i < s.n(); ++i) {
        data.push_back(s.x1()[i]);
        data.push_back(s.x2()[i]);
    }
    return CountSampleD(2, std::move(data));
}

PmfTable::PmfTable(const ThetaBP& theta, std::size_t rmax, std::size_t smax)
    : theta_(theta), rmax_(rmax), smax_(smax), values_((rmax + 1) * (smax + 1), 0.0)
{
    theta.validate();
    const double l1 = theta.lambda1();
    const double l2 = theta.lambda2();
    const double t3 = theta.theta3;
    const std::size_t cols = smax + 1;

    values_[0] = std::exp(t3 - theta.theta1 - theta.theta2);
    for (std::size_t s = 1; s <= smax; ++s) {
        values_[s] = l2 * values_[s - 1] / static_cast<double>(s);
    }
    for (std::size_t r = 1; r <= rmax; ++r) {
        const double* prev = &values_[(r - 1) * cols];
        double* row = &values_[r * cols];
        const double inv_r = 1.0 / static_cast<double>(r);
        row[0] = l1 * prev[0] * inv_r;
        for (std::size_t s = 1; s <= smax; ++s) {
            row[s] = (l1 * prev[s] + t3 * prev[s - 1]) * inv_r;
        }
    }
}

double PmfTable::mass() const noexcept
{
    double m = 0.0;
    for (double v : values_) {
        m += v;
    }
    return m;
}

double pmf_direct(unsigned r, unsigned s, const ThetaBP& theta)
{
    theta.validate();
    const double l1 = theta.lambda1();
    const double l2 = theta.lambda2();
    const double t3 = theta.theta3;
    const double lead = t3 - theta.theta1 - theta.theta2;
    const unsigned top = std::min(r, s);
    double sum = 0.0;
    for (unsigned i = 0; i <= top; ++i) {
        if (i > 0 && t3 == 0.0) {
            break;
        }
        const double lt = xlogy(r - i, l1) + xlogy(s - i, l2) + xlogy(i, t3) -
                          std::lgamma(r - i + 1.0) - std::lgamma(s - i + 1.0) - std::lgamma(i + 1.0);
        sum += std::exp(lead + lt);
    }
    return sum;
}

PmfTable pmf_table(const ThetaBP& theta, std::size_t rmax, std::size_t smax)
{
    return PmfTable(theta, rmax, smax);
}

std::array<double, 3> pmf_grad(unsigned r, unsigned s, const ThetaBP& theta)
{
    const PmfTable t(theta, r, s);
    const long lr = r, ls = s;
    const double p = t(lr, ls);
    const double pr = t(lr - 1, ls);
    const double ps = t(lr, ls - 1);
    const double prs = t(lr - 1, ls - 1);
    return {pr - p, ps - p, prs - pr - ps + p};
}

double pgf(double u1, double u2, const ThetaBP& theta)
{
    return std::exp(theta.theta1 * (u1 - 1.0) + theta.theta2 * (u2 - 1.0) +
                    theta.theta3 * (u1 - 1.0) * (u2 - 1.0));
}

MomentSet moments(const ThetaBP& theta)
{
    theta.validate();
    const double t1 = theta.theta1, t2 = theta.theta2, t3 = theta.theta3;
    MomentSet m{};
    m.mean1 = t1;
    m.mean2 = t2;
    m.var1 = t1;
    m.var2 = t2;
    m.cov = t3;
    m.corr = t3 / std::sqrt(t1 * t2);
    m.e11 = t1 * t2 + t3;
    m.e21 = t1 * t2 + t1 * t1 * t2 + 2.0 * t1 * t3 + t3;
    m.e12 = t1 * t2 + t1 * t2 * t2 + 2.0 * t2 * t3 + t3;
    m.e22 = t1 * t2 + t1 * t2 * t2 + t1 * t1 * t2 + t1 * t1 * t2 * t2 + 4.0 * t1 * t2 * t3 +
            2.0 * t1 * t3 + 2.0 * t2 * t3 + t3 + 2.0 * t3 * t3;
    return m;
}

double stirling2(unsigned n, unsigned k)
{
    if (k > n) {
        return 0.0;
    }
    std::vector<double> row(n + 1, 0.0);
    row[0] = 1.0;
    for (unsigned i = 1; i <= n; ++i) {
        for (unsigned j = std::min(i, k); j >= 1; --j) {
            row[j] = row[j - 1] + j * row[j];
        }
        row[0] = 0.0;
    }
    return row[k];
}

double raw_moment(unsigned r1, unsigned r2, const ThetaBP& theta)
{
    constexpr unsigned kCap = 8;
    if (r1 > kCap || r2 > kCap) {
        throw std::invalid_argument("raw_moment: orders above 8 are not supported");
    }
    theta.validate();
    const double t1 = theta.theta1, t2 = theta.theta2, t3 = theta.theta3;
    auto fact = [](unsigned k) { return std::tgamma(k + 1.0); };

    // factorial moment E[X1^(k) X2^(l)] from the factorial-moment generating function
    auto factorial_moment = [&](unsigned k, unsigned l) {
        double acc = 0.0;
        for (unsigned i = 0; i <= std::min(k, l); ++i) {
            acc += std::pow(t3, i) * std::pow(t1, k - i) * std::pow(t2, l - i) /
                   (fact(i) * fact(k - i) * fact(l - i));
        }
        return fact(k) * fact(l) * acc;
    };

    double total = 0.0;
    for (unsigned k = 0; k <= r1; ++k) {
        const double sk = stirling2(r1, k);
        if (sk == 0.0) {
            continue;
        }
        for (unsigned l = 0; l <= r2; ++l) {
            const double sl = stirling2(r2, l);
            if (sl != 0.0) {
                total += sk * sl * factorial_moment(k, l);
            }
        }
    }
    return total;
}

BivariateCountSample sample_bpd(const ThetaBP& theta, std::size_t n, Rng& rng)
{
    theta.validate();
    const double l1 = theta.lambda1();
    const double l2 = theta.lambda2();
    const double t3 = theta.theta3;
    std::vector<std::uint32_t> x1(n), x2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto y1 = rng.poisson(l1);
        const auto y2 = rng.poisson(l2);
        const auto y3 = rng.poisson(t3);
        x1[i] = static_cast<std::uint32_t>(y1 + y3);
        x2[i] = static_cast<std::uint32_t>(y2 + y3);
    }
    return BivariateCountSample(std::move(x1), std::move(x2));
}

std::size_t default_grid(const ThetaBP& theta)
{
    const double m = theta.theta1 + theta.theta2;
    return static_cast<std::size_t>(std::ceil(m + 15.0 * std::sqrt(m))) + 15;
}

double pgf_d(std::span<const double> u, const ThetaDP& theta)
{
    theta.validate();
    if (u.size() != theta.dim()) {
        throw std::invalid_argument("pgf_d: point dimension does not match theta");
    }
    const double d = static_cast<double>(theta.dim());
    double lin = 0.0, sum_u = 0.0, prod_u = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        lin += theta.thetas[i] * (u[i] - 1.0);
        sum_u += u[i];
        prod_u *= u[i];
    }
    return std::exp(lin + theta.theta_shared * (prod_u - sum_u + d - 1.0));
}

CountSampleD sample_dpd(const ThetaDP& theta, std::size_t n, Rng& rng)
{
    theta.validate();
    const std::size_t d = theta.dim();
    std::vector<std::uint32_t> data(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            data[i * d + k] = static_cast<std::uint32_t>(rng.poisson(theta.thetas[k] - theta.theta_shared));
        }
        const auto shared = static_cast<std::uint32_t>(rng.poisson(theta.theta_shared));
        for (std::size_t k = 0; k < d; ++k) {
            data[i * d + k] += shared;
        }
    }
    return CountSampleD(d, std::move(data));
}

} // namespace bpgof

#pragma once

#include "bpgof/rng.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bpgof {

struct ThetaBP {
    double theta1 = 1.0;
    double theta2 = 1.0;
    double theta3 = 0.0;

    double lambda1() const noexcept { return theta1 - theta3; }
    double lambda2() const noexcept { return theta2 - theta3; }

    // theta3 == 0 passes only when allow_independent is set
    bool valid(bool allow_independent = true) const noexcept;
    // throws std::invalid_argument
    void validate(bool allow_independent = true) const;

    std::string str() const;
    bool operator==(const ThetaBP&) const = default;
};

struct ThetaDP {
    std::vector<double> thetas;
    double theta_shared = 0.0;

    std::size_t dim() const noexcept { return thetas.size(); }
    bool valid() const noexcept;
    void validate() const;
};

// n pairs of counts plus cached summaries
class BivariateCountSample {
public:
    struct Cell {
        std::uint32_t r;
        std::uint32_t s;
        std::size_t count;
    };

    BivariateCountSample() = default;
    BivariateCountSample(std::vector<std::uint32_t> x1, std::vector<std::uint32_t> x2);
    static BivariateCountSample from_pairs(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs);

    std::size_t n() const noexcept { return x1_.size(); }
    bool empty() const noexcept { return x1_.empty(); }
    std::span<const std::uint32_t> x1() const noexcept { return x1_; }
    std::span<const std::uint32_t> x2() const noexcept { return x2_; }

    double mean1() const noexcept { return mean1_; }
    double mean2() const noexcept { return mean2_; }
    // central second moments with divisor n (ddof=0) or n-1 (ddof=1)
    double var1(int ddof = 0) const;
    double var2(int ddof = 0) const;
    double cov(int ddof = 0) const;

    // largest count in either column
    std::uint32_t max_count() const noexcept { return max_; }
    std::uint32_t max1() const noexcept { return max1_; }
    std::uint32_t max2() const noexcept { return max2_; }

    // number of observations equal to (r,s); zero off support or at negative index
    std::size_t count(long r, long s) const noexcept;
    double pn(long r, long s) const noexcept;
    // distinct observed cells, sorted by (r,s)
    const std::vector<Cell>& cells() const noexcept { return cells_; }

private:
    void summarize();

    std::vector<std::uint32_t> x1_;
    std::vector<std::uint32_t> x2_;
    double mean1_ = 0.0;
    double mean2_ = 0.0;
    double ss1_ = 0.0;
    double ss2_ = 0.0;
    double ss12_ = 0.0;
    std::uint32_t max1_ = 0;
    std::uint32_t max2_ = 0;
    std::uint32_t max_ = 0;
    std::vector<Cell> cells_;
    std::vector<std::size_t> counts_; // dense (max1_+1) x (max2_+1) when small, else empty
};

// d-variate count sample, row-major n x d
class CountSampleD {
public:
    CountSampleD() = default;
    CountSampleD(std::size_t d, std::vector<std::uint32_t> data);

    std::size_t dim() const noexcept { return d_; }
    std::size_t n() const noexcept { return d_ == 0 ? 0 : data_.size() / d_; }
    std::uint32_t at(std::size_t i, std::size_t k) const noexcept { return data_[i * d_ + k]; }
    std::span<const std::uint32_t> row(std::size_t i) const noexcept { return {data_.data() + i * d_, d_}; }
    std::uint32_t max_count() const noexcept;
    double mean(std::size_t k) const;
    double cov(std::size_t k, std::size_t l) const;
    const std::vector<std::uint32_t>& data() const noexcept { return data_; }

    static CountSampleD from_bivariate(const BivariateCountSample& s);

private:
    std::size_t d_ = 0;
    std::vector<std::uint32_t> data_;
};

class PmfTable {
public:
    PmfTable(const ThetaBP& theta, std::size_t rmax, std::size_t smax);

    const ThetaBP& theta() const noexcept { return theta_; }
    std::size_t rmax() const noexcept { return rmax_; }
    std::size_t smax() const noexcept { return smax_; }

    // zero at negative indices; r <= rmax, s <= smax otherwise
    double operator()(long r, long s) const noexcept
    {
        if (r < 0 || s < 0) {
            return 0.0;
        }
        return values_[static_cast<std::size_t>(r) * (smax_ + 1) + static_cast<std::size_t>(s)];
    }
    double mass() const noexcept;
    const std::vector<double>& values() const noexcept { return values_; }

private:
    ThetaBP theta_;
    std::size_t rmax_;
    std::size_t smax_;
    std::vector<double> values_;
};

struct MomentSet {
    double mean1, mean2;
    double var1, var2;
    double cov, corr;
    double e11;  // E(X1 X2)
    double e21;  // E(X1^2 X2)
    double e12;  // E(X1 X2^2)
    double e22;  // E(X1^2 X2^2)
};

double pmf_direct(unsigned r, unsigned s, const ThetaBP& theta);
PmfTable pmf_table(const ThetaBP& theta, std::size_t rmax, std::size_t smax);
std::array<double, 3> pmf_grad(unsigned r, unsigned s, const ThetaBP& theta);
double pgf(double u1, double u2, const ThetaBP& theta);
MomentSet moments(const ThetaBP& theta);
// Stirling numbers of the second kind
double stirling2(unsigned n, unsigned k);
// E(X1^r1 X2^r2), orders up to 8
double raw_moment(unsigned r1, unsigned r2, const ThetaBP& theta);
BivariateCountSample sample_bpd(const ThetaBP& theta, std::size_t n, Rng& rng);

// grid extent with negligible omitted mass
std::size_t default_grid(const ThetaBP& theta);

double pgf_d(std::span<const double> u, const ThetaDP& theta);
CountSampleD sample_dpd(const ThetaDP& theta, std::size_t n, Rng& rng);

} // namespace bpgof

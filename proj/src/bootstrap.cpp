#include "bpgof/bootstrap.hpp"

#include "bpgof/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace bpgof {

namespace {

constexpr double kIntTol = 1e-9;

void check_config(const BootstrapConfig& cfg)
{
    if (cfg.B < 1) {
        throw std::invalid_argument("bootstrap: B must be at least 1");
    }
    for (double a : cfg.alphas) {
        if (!(a > 0.0 && a < 1.0)) {
            throw std::invalid_argument("bootstrap: every alpha must lie in (0,1)");
        }
    }
}

void check_spec(const StatSpec& s)
{
    if (s.kind != StatKind::R && s.kind != StatKind::S && s.kind != StatKind::W) {
        throw std::invalid_argument(std::string("bootstrap: statistic ") + to_string(s.kind) +
                                    " is not bootstrapped on bivariate samples");
    }
    s.w.validate();
}

double observed_stat(const StatSpec& s, const BivariateCountSample& sample, const ThetaBP& th)
{
    return compute_stat(s.kind, sample, th, s.w).value;
}

FitResult fit_original(const BivariateCountSample& sample, const BootstrapConfig& cfg)
{
    FitOptions opts;
    opts.clamp = cfg.clamp_original;
    FitResult fr;
    try {
        fr = fit(cfg.estimator, sample, opts);
    } catch (const StatError& e) {
        throw StatError(ErrorKind::EstimatorFailedOnOriginal,
                        std::string("estimator failed on the original sample: ") + e.what());
    }
    if (!fr.converged && !cfg.clamp_original) {
        throw StatError(ErrorKind::EstimatorFailedOnOriginal,
                        "estimator did not converge on the original sample (" + fr.diagnostic + ")");
    }
    return fr;
}

std::map<double, double> criticals(const std::vector<double>& reps, const std::vector<double>& alphas)
{
    std::map<double, double> out;
    for (double a : alphas) {
        out[a] = critical_value(reps, a);
    }
    return out;
}

} // namespace

unsigned default_workers() noexcept
{
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body)
{
    const std::size_t nthreads = std::min<std::size_t>(std::max(1u, workers), count);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

double bootstrap_pvalue(const std::vector<double>& replicates, double observed)
{
    if (replicates.empty()) {
        throw std::invalid_argument("bootstrap_pvalue: no replicates");
    }
    const auto hits = std::count_if(replicates.begin(), replicates.end(), [&](double r) { return r >= observed; });
    return static_cast<double>(hits) / static_cast<double>(replicates.size());
}

double critical_value(std::vector<double> replicates, double alpha)
{
    if (replicates.empty()) {
        throw std::invalid_argument("critical_value: no replicates");
    }
    const std::size_t b = replicates.size();
    std::sort(replicates.begin(), replicates.end());
    const auto a = static_cast<std::size_t>(std::floor((1.0 - alpha) * static_cast<double>(b) + kIntTol)) + 1;
    return replicates[std::min(a, b) - 1];
}

double critical_value_bracket(std::vector<double> replicates, double alpha)
{
    if (replicates.empty()) {
        throw std::invalid_argument("critical_value_bracket: no replicates");
    }
    const double target = (1.0 - alpha) * static_cast<double>(replicates.size());
    const double rounded = std::round(target);
    if (std::fabs(target - rounded) <= kIntTol && rounded >= 1.0) {
        std::sort(replicates.begin(), replicates.end());
        return replicates[static_cast<std::size_t>(rounded) - 1];
    }
    return critical_value(std::move(replicates), alpha);
}

std::vector<GofTestReport> bootstrap_tests(const BivariateCountSample& sample, const std::vector<StatSpec>& stats,
                                           const BootstrapConfig& cfg)
{
    check_config(cfg);
    if (sample.empty()) {
        throw std::invalid_argument("bootstrap: empty sample");
    }
    for (const auto& s : stats) {
        check_spec(s);
    }
    const FitResult fr = fit_original(sample, cfg);
    const ThetaBP th = fr.theta_hat;
    const std::size_t k = stats.size();

    std::vector<double> reps(cfg.B * k);
    FitOptions ropts;
    ropts.clamp = true;
    parallel_for(cfg.B, cfg.max_workers, [&](std::size_t b) {
        Rng rng(derive_seed(cfg.seed, {b}));
        const auto boot = sample_bpd(th, sample.n(), rng);
        const ThetaBP tb = fit(cfg.estimator, boot, ropts).theta_hat;
        for (std::size_t j = 0; j < k; ++j) {
            reps[b * k + j] = observed_stat(stats[j], boot, tb);
        }
    });

    std::vector<GofTestReport> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        GofTestReport r;
        r.stat = compute_stat(stats[j].kind, sample, th, stats[j].w);
        r.w = stats[j].w;
        r.theta_hat = th;
        r.estimator = cfg.estimator;
        r.seed = cfg.seed;
        r.B = cfg.B;
        r.replicates.resize(cfg.B);
        for (std::size_t b = 0; b < cfg.B; ++b) {
            r.replicates[b] = reps[b * k + j];
        }
        r.p_value = bootstrap_pvalue(r.replicates, r.stat.value);
        r.stat.p_value = r.p_value;
        r.critical_values = criticals(r.replicates, cfg.alphas);
        out.push_back(std::move(r));
    }
    return out;
}

GofTestReport bootstrap_test(const BivariateCountSample& sample, const StatSpec& stat, const BootstrapConfig& cfg)
{
    return bootstrap_tests(sample, {stat}, cfg).front();
}

ThetaDP fit_dpd_mm(const CountSampleD& sample, double eps)
{
    const std::size_t d = sample.dim();
    if (d < 2 || sample.n() == 0) {
        throw std::invalid_argument("fit_dpd_mm: need d >= 2 and a nonempty sample");
    }
    ThetaDP th;
    th.thetas.resize(d);
    double lowest = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        th.thetas[k] = std::max(sample.mean(k), 2.0 * eps);
        lowest = k == 0 ? th.thetas[k] : std::min(lowest, th.thetas[k]);
    }
    double c = 0.0;
    std::size_t pairs = 0;
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = k + 1; l < d; ++l) {
            c += sample.cov(k, l);
            ++pairs;
        }
    }
    c /= static_cast<double>(pairs);
    th.theta_shared = std::clamp(c, eps, std::max(lowest - eps, eps));
    return th;
}

GofTestReportD bootstrap_test_wd(const CountSampleD& sample, const BootstrapConfig& cfg)
{
    check_config(cfg);
    const ThetaDP th = fit_dpd_mm(sample);
    GofTestReportD out;
    out.theta_hat = th;
    out.seed = cfg.seed;
    out.observed = stat_Wd(sample, th).value;
    out.replicates.resize(cfg.B);
    parallel_for(cfg.B, cfg.max_workers, [&](std::size_t b) {
        Rng rng(derive_seed(cfg.seed, {b}));
        const auto boot = sample_dpd(th, sample.n(), rng);
        out.replicates[b] = stat_Wd(boot, fit_dpd_mm(boot)).value;
    });
    out.p_value = bootstrap_pvalue(out.replicates, out.observed);
    out.critical_values = criticals(out.replicates, cfg.alphas);
    return out;
}

} // namespace bpgof

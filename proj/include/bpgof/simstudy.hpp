#pragma once

#include "bpgof/alternatives.hpp"
#include "bpgof/bootstrap.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bpgof {

enum class SimMode { TypeI, Power };

struct SimConfig {
    SimMode mode = SimMode::TypeI;
    ThetaBP null_theta{1.0, 1.0, 0.5};
    // power mode draws from this law; without it the null itself is used
    std::optional<AltSpec> alt;
    std::size_t n = 50;
    std::size_t reps = 300;
    BootstrapConfig boot{300, {0.05, 0.10}, EstimatorKind::ML, 0, 1, true};
    std::vector<StatSpec> stats{{StatKind::R, {}}, {StatKind::S, {}}, {StatKind::W, {}},
                                {StatKind::T, {}}, {StatKind::IB, {}}, {StatKind::NIB, {}}};
    std::uint64_t master_seed = 1;
    unsigned workers = 1;
};

struct SimResultRow {
    std::string stat;
    std::size_t n = 0;
    std::string theta_or_alt;
    std::optional<double> f05;
    std::optional<double> f10;
    std::optional<double> ks_pvalue;
    std::optional<double> power05;
    std::uint64_t seed = 0;
    double wall_time = 0.0;  // not persisted

    bool operator==(const SimResultRow& o) const
    {
        return stat == o.stat && n == o.n && theta_or_alt == o.theta_or_alt && f05 == o.f05 && f10 == o.f10 &&
               ks_pvalue == o.ks_pvalue && power05 == o.power05 && seed == o.seed;
    }
};

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// one-sample Kolmogorov-Smirnov test against U(0,1)
KsResult ks_uniformity(std::vector<double> pvalues);

// label such as "R(0,0)", "W" or "IB"
std::string stat_label(const StatSpec& spec);
StatSpec parse_stat_label(const std::string& label);

// p-values of every configured statistic, indexed [rep][stat]
std::vector<std::vector<double>> simulate_pvalues(const SimConfig& cfg);

std::vector<SimResultRow> run_type1(const SimConfig& cfg);
std::vector<SimResultRow> run_power(const SimConfig& cfg);

struct TimingRow {
    std::string stat;
    double mean_seconds = 0.0;
    std::vector<double> p_values;
};

// mean wall-clock seconds per bootstrap test on null samples; only R, S and W are timed
std::vector<TimingRow> run_timing(const SimConfig& cfg);

enum class ResultFormat { CSV, JSON };

ResultFormat parse_format(const std::string& name);
void write_results(std::ostream& out, const std::vector<SimResultRow>& rows, ResultFormat format);
void persist_results(const std::vector<SimResultRow>& rows, const std::string& path, ResultFormat format);
std::vector<SimResultRow> load_results(const std::string& path, ResultFormat format);

} // namespace bpgof

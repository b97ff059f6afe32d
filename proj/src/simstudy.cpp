#include "bpgof/simstudy.hpp"

#include "bpgof/errors.hpp"
#include "bpgof/special.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bpgof {

namespace {

using Clock = std::chrono::steady_clock;

void check(const SimConfig& cfg)
{
    if (cfg.reps < 1) {
        throw std::invalid_argument("simulation: reps must be at least 1");
    }
    if (cfg.n < 2) {
        throw std::invalid_argument("simulation: n must be at least 2");
    }
    if (cfg.stats.empty()) {
        throw std::invalid_argument("simulation: no statistics selected");
    }
    for (const auto& s : cfg.stats) {
        if (s.kind == StatKind::Wd) {
            throw std::invalid_argument("simulation: Wd is not part of the bivariate study");
        }
        s.w.validate();
    }
    if (cfg.mode == SimMode::TypeI || !cfg.alt) {
        if (!cfg.null_theta.valid(false)) {
            throw std::invalid_argument("simulation: null theta " + cfg.null_theta.str() + " is not in the null family");
        }
    }
    if (cfg.alt) {
        validate(*cfg.alt);
    }
}

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string law_label(const SimConfig& cfg)
{
    if (cfg.mode == SimMode::Power && cfg.alt) {
        return describe(*cfg.alt);
    }
    const auto& t = cfg.null_theta;
    return "PB(" + short_num(t.theta1) + "," + short_num(t.theta2) + "," + short_num(t.theta3) + ")";
}

double fraction_at_most(const std::vector<std::vector<double>>& p, std::size_t j, double level)
{
    std::size_t hits = 0;
    for (const auto& row : p) {
        hits += row[j] <= level;
    }
    return static_cast<double>(hits) / static_cast<double>(p.size());
}

std::vector<SimResultRow> summarize(const SimConfig& cfg, const std::vector<std::vector<double>>& p,
                                    double seconds)
{
    std::vector<SimResultRow> rows;
    const std::string law = law_label(cfg);
    for (std::size_t j = 0; j < cfg.stats.size(); ++j) {
        SimResultRow row;
        row.stat = stat_label(cfg.stats[j]);
        row.n = cfg.n;
        row.theta_or_alt = law;
        row.seed = cfg.master_seed;
        row.wall_time = seconds;
        row.f05 = fraction_at_most(p, j, 0.05);
        row.f10 = fraction_at_most(p, j, 0.10);
        if (cfg.mode == SimMode::TypeI) {
            std::vector<double> col;
            col.reserve(p.size());
            for (const auto& r : p) {
                col.push_back(r[j]);
            }
            row.ks_pvalue = ks_uniformity(std::move(col)).p_value;
        } else {
            row.power05 = row.f05;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// CSV field splitter that honours double quotes
std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string opt_num(const std::optional<double>& x)
{
    return x ? num(*x) : std::string();
}

std::optional<double> parse_opt(const std::string& s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) {
        throw std::runtime_error("malformed number '" + s + "' in results file");
    }
    return v;
}

const char* const kHeader = "stat,n,theta_or_alt,f05,f10,ks_pvalue,power05,seed";

} // namespace

KsResult ks_uniformity(std::vector<double> pvalues)
{
    if (pvalues.empty()) {
        throw std::invalid_argument("ks_uniformity: empty list");
    }
    std::sort(pvalues.begin(), pvalues.end());
    const double m = static_cast<double>(pvalues.size());
    double d = 0.0;
    for (std::size_t i = 0; i < pvalues.size(); ++i) {
        const double x = pvalues[i];
        d = std::max({d, (static_cast<double>(i) + 1.0) / m - x, x - static_cast<double>(i) / m});
    }
    return {d, kolmogorov_sf(std::sqrt(m) * d)};
}

std::string stat_label(const StatSpec& spec)
{
    std::string base = to_string(spec.kind);
    if (spec.kind == StatKind::R || spec.kind == StatKind::S) {
        base += "(" + short_num(spec.w.a1) + "," + short_num(spec.w.a2) + ")";
    }
    return base;
}

StatSpec parse_stat_label(const std::string& label)
{
    StatSpec spec;
    const auto open = label.find('(');
    spec.kind = parse_stat(label.substr(0, open));
    if (open != std::string::npos) {
        const auto comma = label.find(',', open);
        const auto close = label.find(')', open);
        if (comma == std::string::npos || close == std::string::npos || close < comma) {
            throw std::invalid_argument("malformed statistic label '" + label + "'");
        }
        spec.w.a1 = std::stod(label.substr(open + 1, comma - open - 1));
        spec.w.a2 = std::stod(label.substr(comma + 1, close - comma - 1));
    }
    return spec;
}

std::vector<std::vector<double>> simulate_pvalues(const SimConfig& cfg)
{
    check(cfg);
    std::vector<StatSpec> boot_specs;
    std::vector<std::size_t> boot_cols;
    for (std::size_t j = 0; j < cfg.stats.size(); ++j) {
        if (needs_bootstrap(cfg.stats[j].kind)) {
            boot_specs.push_back(cfg.stats[j]);
            boot_cols.push_back(j);
        }
    }
    std::optional<AltSampler> sampler;
    if (cfg.mode == SimMode::Power && cfg.alt) {
        sampler.emplace(*cfg.alt);
    }

    std::vector<std::vector<double>> p(cfg.reps, std::vector<double>(cfg.stats.size(), 1.0));
    parallel_for(cfg.reps, cfg.workers, [&](std::size_t i) {
        Rng rng(derive_seed(cfg.master_seed, {i, 0}));
        const auto sample = sampler ? sampler->sample(cfg.n, rng) : sample_bpd(cfg.null_theta, cfg.n, rng);

        if (!boot_specs.empty()) {
            BootstrapConfig bc = cfg.boot;
            bc.seed = derive_seed(cfg.master_seed, {i, 1});
            bc.max_workers = 1;
            bc.clamp_original = true;
            const auto reports = bootstrap_tests(sample, boot_specs, bc);
            for (std::size_t k = 0; k < reports.size(); ++k) {
                p[i][boot_cols[k]] = reports[k].p_value;
            }
        }
        for (std::size_t j = 0; j < cfg.stats.size(); ++j) {
            if (needs_bootstrap(cfg.stats[j].kind)) {
                continue;
            }
            try {
                p[i][j] = compute_stat(cfg.stats[j].kind, sample, cfg.null_theta, cfg.stats[j].w).p_value.value_or(1.0);
            } catch (const StatError&) {
                // undefined statistic: no rejection
                p[i][j] = 1.0;
            }
        }
    });
    return p;
}

std::vector<SimResultRow> run_type1(const SimConfig& cfg)
{
    SimConfig c = cfg;
    c.mode = SimMode::TypeI;
    const auto start = Clock::now();
    const auto p = simulate_pvalues(c);
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    return summarize(c, p, secs);
}

std::vector<SimResultRow> run_power(const SimConfig& cfg)
{
    SimConfig c = cfg;
    c.mode = SimMode::Power;
    const auto start = Clock::now();
    const auto p = simulate_pvalues(c);
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    return summarize(c, p, secs);
}

std::vector<TimingRow> run_timing(const SimConfig& cfg)
{
    std::vector<TimingRow> out;
    if (cfg.reps == 0) {
        return out;
    }
    SimConfig c = cfg;
    c.mode = SimMode::TypeI;
    check(c);
    for (const auto& spec : c.stats) {
        if (!needs_bootstrap(spec.kind)) {
            continue;
        }
        TimingRow row;
        row.stat = stat_label(spec);
        double total = 0.0;
        for (std::size_t i = 0; i < c.reps; ++i) {
            Rng rng(derive_seed(c.master_seed, {i, 0}));
            const auto sample = sample_bpd(c.null_theta, c.n, rng);
            BootstrapConfig bc = c.boot;
            bc.seed = derive_seed(c.master_seed, {i, 1});
            bc.max_workers = std::max(1u, c.workers);
            bc.clamp_original = true;
            const auto start = Clock::now();
            const auto rep = bootstrap_test(sample, spec, bc);
            total += std::chrono::duration<double>(Clock::now() - start).count();
            row.p_values.push_back(rep.p_value);
        }
        row.mean_seconds = total / static_cast<double>(c.reps);
        out.push_back(std::move(row));
    }
    return out;
}

ResultFormat parse_format(const std::string& name)
{
    if (name == "csv") return ResultFormat::CSV;
    if (name == "json") return ResultFormat::JSON;
    throw std::invalid_argument("unknown format '" + name + "' (expected csv or json)");
}

void write_results(std::ostream& out, const std::vector<SimResultRow>& rows, ResultFormat format)
{
    if (format == ResultFormat::CSV) {
        out << kHeader << '\n';
        for (const auto& r : rows) {
            out << quote(r.stat) << ',' << r.n << ',' << quote(r.theta_or_alt) << ',' << opt_num(r.f05) << ','
                << opt_num(r.f10) << ',' << opt_num(r.ks_pvalue) << ',' << opt_num(r.power05) << ',' << r.seed
                << '\n';
        }
        return;
    }
    using Json = nlohmann::ordered_json;
    auto opt = [](const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); };
    Json arr = Json::array();
    for (const auto& r : rows) {
        arr.push_back({{"stat", r.stat},
                       {"n", r.n},
                       {"theta_or_alt", r.theta_or_alt},
                       {"f05", opt(r.f05)},
                       {"f10", opt(r.f10)},
                       {"ks_pvalue", opt(r.ks_pvalue)},
                       {"power05", opt(r.power05)},
                       {"seed", r.seed}});
    }
    out << arr.dump(2) << '\n';
}

void persist_results(const std::vector<SimResultRow>& rows, const std::string& path, ResultFormat format)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_results(out, rows, format);
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

std::vector<SimResultRow> load_results(const std::string& path, ResultFormat format)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::vector<SimResultRow> rows;
    if (format == ResultFormat::CSV) {
        std::string line;
        if (!std::getline(in, line) || split_csv(line) != split_csv(kHeader)) {
            throw std::runtime_error("'" + path + "' lacks the results header");
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            if (f.size() != 8) {
                throw std::runtime_error("malformed results row: " + line);
            }
            SimResultRow r;
            r.stat = f[0];
            r.n = std::stoull(f[1]);
            r.theta_or_alt = f[2];
            r.f05 = parse_opt(f[3]);
            r.f10 = parse_opt(f[4]);
            r.ks_pvalue = parse_opt(f[5]);
            r.power05 = parse_opt(f[6]);
            r.seed = std::stoull(f[7]);
            rows.push_back(std::move(r));
        }
    } else {
        const auto arr = nlohmann::json::parse(in);
        auto opt = [](const nlohmann::json& j) -> std::optional<double> {
            if (j.is_null()) return std::nullopt;
            return j.get<double>();
        };
        for (const auto& o : arr) {
            SimResultRow r;
            r.stat = o.at("stat").get<std::string>();
            r.n = o.at("n").get<std::size_t>();
            r.theta_or_alt = o.at("theta_or_alt").get<std::string>();
            r.f05 = opt(o.at("f05"));
            r.f10 = opt(o.at("f10"));
            r.ks_pvalue = opt(o.at("ks_pvalue"));
            r.power05 = opt(o.at("power05"));
            r.seed = o.at("seed").get<std::uint64_t>();
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

} // namespace bpgof

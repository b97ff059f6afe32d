// bpgof: goodness-of-fit tests for bivariate Poisson count data.

#include "bpgof/alternatives.hpp"
#include "bpgof/bootstrap.hpp"
#include "bpgof/errors.hpp"
#include "bpgof/estimators.hpp"
#include "bpgof/gof_stats.hpp"
#include "bpgof/sample_io.hpp"
#include "bpgof/simstudy.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace bpgof;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitStat = 2;
constexpr int kExitUsage = 3;

const char* const kPvalueNote =
    "Bootstrap p-values are Monte Carlo estimates with resolution 1/B; reproducing a published\n"
    "p-value from the same data is a statistical match, not an exact one.";

std::vector<double> parse_list(const std::string& text, const char* what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != tok.size() || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": '" + tok + "' is not a number");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw std::invalid_argument(std::string(what) + ": empty list");
    }
    return out;
}

ThetaBP parse_theta(const std::string& text, bool allow_independent)
{
    const auto v = parse_list(text, "--theta");
    if (v.size() != 3) {
        throw std::invalid_argument("--theta needs three values theta1,theta2,theta3");
    }
    ThetaBP t{v[0], v[1], v[2]};
    t.validate(allow_independent);
    return t;
}

// split on commas outside parentheses: "r(1,0),s,w" -> {"r(1,0)", "s", "w"}
std::vector<StatSpec> parse_stats(const std::string& text, const WeightExponents& w)
{
    std::vector<StatSpec> out;
    std::string cur;
    int depth = 0;
    auto flush = [&] {
        if (cur.empty()) {
            throw std::invalid_argument("--stats: empty entry");
        }
        StatSpec s = parse_stat_label(cur);
        if (cur.find('(') == std::string::npos) {
            s.w = w;
        }
        s.w.validate();
        out.push_back(s);
        cur.clear();
    };
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            flush();
        } else if (c != ' ') {
            cur += c;
        }
    }
    flush();
    return out;
}

unsigned resolve_workers(int flag)
{
    if (flag > 0) {
        return static_cast<unsigned>(flag);
    }
    if (const char* env = std::getenv("BPGOF_WORKERS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        throw std::invalid_argument("BPGOF_WORKERS must be a positive integer");
    }
    return default_workers();
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
}

Json theta_json(const ThetaBP& t)
{
    return Json::array({t.theta1, t.theta2, t.theta3});
}

struct Common {
    std::string input;
    std::string output;
    std::string stat = "w";
    std::string stats = "r,s,w,t,ib,nib";
    std::string estimator = "ml";
    std::string theta = "1,1,0.5";
    std::string dist = "pb";
    std::string params;
    std::string format = "csv";
    std::string mode;
    double a1 = 0.0;
    double a2 = 0.0;
    long long B = 500;
    long long n = 50;
    long long reps = 300;
    std::uint64_t seed = 0;
    int workers = 0;
    bool se = false;
};

int cmd_test(const Common& o)
{
    const StatKind kind = parse_stat(o.stat);
    const WeightExponents w{o.a1, o.a2};
    w.validate();
    if (o.B < 1) {
        throw std::invalid_argument("--B must be at least 1");
    }
    BootstrapConfig cfg;
    cfg.B = static_cast<std::size_t>(o.B);
    cfg.estimator = parse_estimator(o.estimator);
    cfg.seed = o.seed;
    cfg.max_workers = resolve_workers(o.workers);

    const CountTable table = read_count_file(o.input);
    Json j;
    j["schema"] = 1;
    j["command"] = "test";

    if (kind == StatKind::Wd) {
        const auto sample = to_dsample(table);
        const auto rep = bootstrap_test_wd(sample, cfg);
        j["stat"] = "Wd";
        j["n"] = sample.n();
        j["d"] = sample.dim();
        j["estimator"] = "MM";
        j["theta_hat"] = {{"thetas", rep.theta_hat.thetas}, {"theta_shared", rep.theta_hat.theta_shared}};
        j["observed"] = rep.observed;
        j["p_value"] = rep.p_value;
        j["B"] = cfg.B;
        j["seed"] = rep.seed;
        Json cv = Json::object();
        for (const auto& [a, v] : rep.critical_values) cv[Json(a).dump()] = v;
        j["critical_values"] = cv;
        j["replicates"] = rep.replicates;
    } else {
        const auto sample = to_bivariate(table);
        if (!needs_bootstrap(kind)) {
            const auto sv = compute_stat(kind, sample, ThetaBP{}, w);
            j["stat"] = to_string(kind);
            j["n"] = sample.n();
            j["observed"] = sv.value;
            j["p_value"] = sv.p_value.value_or(1.0);
            j["df"] = sv.df;
            j["p_value_kind"] = "asymptotic chi-square";
        } else {
            const auto rep = bootstrap_test(sample, {kind, w}, cfg);
            j["stat"] = stat_label({kind, w});
            j["n"] = sample.n();
            j["estimator"] = to_string(rep.estimator);
            j["theta_hat"] = theta_json(rep.theta_hat);
            j["observed"] = rep.stat.value;
            j["p_value"] = rep.p_value;
            j["B"] = rep.B;
            j["seed"] = rep.seed;
            Json cv = Json::object();
            for (const auto& [a, v] : rep.critical_values) cv[Json(a).dump()] = v;
            j["critical_values"] = cv;
            j["replicates"] = rep.replicates;
        }
    }
    emit(j.dump(2) + "\n", o.output);
    return 0;
}

int cmd_estimate(const Common& o)
{
    const EstimatorKind kind = parse_estimator(o.estimator);
    const auto sample = to_bivariate(read_count_file(o.input));
    const auto fr = fit(kind, sample, FitOptions{});
    if (!fr.converged) {
        throw StatError(ErrorKind::NonConvergence, std::string(to_string(kind)) + " did not converge: " + fr.diagnostic);
    }
    Json j;
    j["schema"] = 1;
    j["command"] = "estimate";
    j["method"] = to_string(kind);
    j["n"] = sample.n();
    j["theta_hat"] = theta_json(fr.theta_hat);
    if (kind == EstimatorKind::ML) {
        j["iterations"] = fr.iterations;
    }
    j["converged"] = fr.converged;
    if (o.se) {
        const auto cov = asym_cov(kind, fr.theta_hat).matrix;
        const double n = static_cast<double>(sample.n());
        j["std_errors"] = Json::array(
            {std::sqrt(cov[0][0] / n), std::sqrt(cov[1][1] / n), std::sqrt(cov[2][2] / n)});
    }
    emit(j.dump(2) + "\n", o.output);
    return 0;
}

int cmd_sample(const Common& o)
{
    if (o.n < 1) {
        throw std::invalid_argument("--n must be at least 1");
    }
    const auto n = static_cast<std::size_t>(o.n);
    Rng rng(derive_seed(o.seed, {}));
    std::ostringstream out;
    if (o.dist == "pb") {
        write_counts(out, sample_bpd(parse_theta(o.theta, true), n, rng));
    } else if (o.dist == "dpd") {
        auto v = parse_list(o.params.empty() ? o.theta : o.params, "--params");
        if (v.size() < 3) {
            throw std::invalid_argument("dpd needs theta_1..theta_d,theta_shared with d >= 2");
        }
        ThetaDP th;
        th.theta_shared = v.back();
        v.pop_back();
        th.thetas = v;
        th.validate();
        write_counts(out, sample_dpd(th, n, rng));
    } else {
        const AltSpec spec = make_alt(o.dist, parse_list(o.params, "--params"));
        write_counts(out, sample_alt(spec, n, rng));
    }
    emit(out.str(), o.output);
    return 0;
}

SimConfig sim_config(const Common& o)
{
    if (o.reps < 1) {
        throw std::invalid_argument("--reps must be at least 1");
    }
    if (o.n < 2) {
        throw std::invalid_argument("--n must be at least 2");
    }
    if (o.B < 1) {
        throw std::invalid_argument("--B must be at least 1");
    }
    SimConfig c;
    c.n = static_cast<std::size_t>(o.n);
    c.reps = static_cast<std::size_t>(o.reps);
    c.boot.B = static_cast<std::size_t>(o.B);
    c.boot.estimator = parse_estimator(o.estimator);
    c.stats = parse_stats(o.stats, {o.a1, o.a2});
    c.master_seed = o.seed;
    c.workers = resolve_workers(o.workers);
    c.null_theta = parse_theta(o.theta, false);
    return c;
}

int cmd_simulate(const Common& o, const std::string& mode)
{
    const ResultFormat fmt = parse_format(o.format);
    if (mode == "timing") {
        SimConfig c = sim_config(o);
        const auto rows = run_timing(c);
        Json j;
        j["schema"] = 1;
        j["command"] = "timing";
        j["n"] = c.n;
        j["reps"] = c.reps;
        j["B"] = c.boot.B;
        Json arr = Json::array();
        for (const auto& r : rows) {
            arr.push_back({{"stat", r.stat}, {"mean_seconds", r.mean_seconds}});
        }
        j["rows"] = arr;
        emit(j.dump(2) + "\n", o.output);
        return 0;
    }
    SimConfig c = sim_config(o);
    std::vector<SimResultRow> rows;
    if (mode == "type1") {
        rows = run_type1(c);
    } else if (mode == "power") {
        if (o.dist != "pb") {
            c.alt = make_alt(o.dist, parse_list(o.params, "--params"));
        }
        rows = run_power(c);
    } else {
        throw std::invalid_argument("--mode must be type1, power or timing");
    }
    if (o.output.empty() || o.output == "-") {
        write_results(std::cout, rows, fmt);
    } else {
        persist_results(rows, o.output, fmt);
    }
    return 0;
}

void add_workers(CLI::App* app, Common& o)
{
    app->add_option("--workers", o.workers, "Worker threads (default: BPGOF_WORKERS or all cores)")
        ->check(CLI::PositiveNumber);
}

void add_sim_flags(CLI::App* app, Common& o, const char* default_stats)
{
    o.stats = default_stats;
    app->add_option("--theta", o.theta, "Null parameter theta1,theta2,theta3")->capture_default_str();
    app->add_option("--n", o.n, "Sample size")->capture_default_str();
    app->add_option("--reps", o.reps, "Monte Carlo replications")->capture_default_str();
    app->add_option("--B", o.B, "Bootstrap replicates per test")->capture_default_str();
    app->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    app->add_option("--stats", o.stats, "Statistics, e.g. r,s,w,t,ib,nib or r(1,0)")->capture_default_str();
    app->add_option("--a1", o.a1, "Weight exponent a1 for R and S")->capture_default_str();
    app->add_option("--a2", o.a2, "Weight exponent a2 for R and S")->capture_default_str();
    app->add_option("--estimator,--method", o.estimator, "Estimator refit in each replicate")->capture_default_str();
    app->add_option("--output,--out", o.output, "Result file (default: stdout)");
    app->add_option("--format", o.format, "csv or json")->capture_default_str();
    add_workers(app, o);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{std::string("Goodness-of-fit tests for the bivariate Poisson distribution.\n\n") + kPvalueNote};
    app.require_subcommand(1);
    Common o;

    auto* test = app.add_subcommand("test", "Bootstrap goodness-of-fit test on a data file");
    test->footer(kPvalueNote);
    test->add_option("--input", o.input, "CSV of counts (two columns; d columns for --stat wd)")->required();
    test->add_option("--stat", o.stat, "r, s, w, t, ib, nib or wd")->capture_default_str();
    test->add_option("--a1", o.a1, "Weight exponent a1 (> -1)")->capture_default_str();
    test->add_option("--a2", o.a2, "Weight exponent a2 (> -1)")->capture_default_str();
    test->add_option("--estimator,--method", o.estimator, "ml, mm, dz, pp or pc")->capture_default_str();
    test->add_option("--B", o.B, "Bootstrap replicates")->capture_default_str();
    test->add_option("--seed", o.seed, "Seed")->capture_default_str();
    test->add_option("--output,--out", o.output, "JSON report path (default: stdout)");
    add_workers(test, o);

    auto* est = app.add_subcommand("estimate", "Estimate theta from a data file");
    est->add_option("--input", o.input, "CSV of counts (two columns)")->required();
    est->add_option("--method,--estimator", o.estimator, "ml, mm, dz, pp or pc")->capture_default_str();
    est->add_flag("--se", o.se, "Report asymptotic standard errors");
    est->add_option("--output,--out", o.output, "JSON path (default: stdout)");

    auto* smp = app.add_subcommand("sample", "Draw a sample and write it as CSV");
    smp->add_option("--dist", o.dist, "pb, dpd, bb, bnb, ppb, ntab or slb")->capture_default_str();
    smp->add_option("--theta", o.theta, "pb: theta1,theta2,theta3; dpd: theta_1..theta_d,theta_shared")
        ->capture_default_str();
    smp->add_option("--params", o.params,
                    "bb: m,p1,p2,p3; bnb: nu,g0,g1,g2; ppb: p,a1,a2,a3,b1,b2,b3; ntab: lambda,l1,l2,l3; slb: l1,l2,l3");
    smp->add_option("--n", o.n, "Sample size")->capture_default_str();
    smp->add_option("--seed", o.seed, "Seed")->capture_default_str();
    smp->add_option("--output,--out", o.output, "CSV path (default: stdout)");

    auto* t1 = app.add_subcommand("simulate-type1", "Empirical level under the null");
    add_sim_flags(t1, o, "r,s,w,t,ib,nib");

    auto* pw = app.add_subcommand("simulate-power", "Empirical power against an alternative");
    add_sim_flags(pw, o, "r,s,w,t,ib,nib");
    pw->add_option("--dist", o.dist, "bb, bnb, ppb, ntab, slb or pb")->capture_default_str();
    pw->add_option("--params", o.params, "Alternative parameters, as for 'sample'");

    auto* tm = app.add_subcommand("timing", "Mean time per bootstrap test");
    add_sim_flags(tm, o, "r,s,w");

    auto* sim = app.add_subcommand("simulate", "Simulation study (--mode type1|power|timing)");
    add_sim_flags(sim, o, "r,s,w,t,ib,nib");
    sim->add_option("--mode", o.mode, "type1, power or timing")->required();
    sim->add_option("--dist", o.dist, "Power alternative")->capture_default_str();
    sim->add_option("--params", o.params, "Alternative parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*test) return cmd_test(o);
        if (*est) return cmd_estimate(o);
        if (*smp) return cmd_sample(o);
        if (*t1) return cmd_simulate(o, "type1");
        if (*pw) return cmd_simulate(o, "power");
        if (*tm) return cmd_simulate(o, "timing");
        if (*sim) return cmd_simulate(o, o.mode);
    } catch (const StatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStat;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}

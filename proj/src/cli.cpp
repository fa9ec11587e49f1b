#include "fbd/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbd/classical.hpp"
#include "fbd/fractional.hpp"
#include "fbd/mittag_leffler.hpp"
#include "fbd/monte_carlo.hpp"
#include "fbd/oracle.hpp"
#include "fbd/output.hpp"

namespace fbd {

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CommonFlags {
    double lambda = 1.0;
    double mu = 0.0;
    double nu = 1.0;
    std::string format = "json";
    double tol = 0.0;  // 0 means "not given on the command line"
};

void add_model_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--lambda", f.lambda, "birth rate, > 0")->required();
    cmd->add_option("--mu", f.mu, "death rate, >= 0")->required();
    cmd->add_option("--nu", f.nu, "fractional order in (0, 1]")->capture_default_str();
    cmd->add_option("--format", f.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

ModelParams model(const CommonFlags& f) {
    ModelParams p{f.lambda, f.mu, f.nu};
    p.validate();
    return p;
}

struct Tolerance {
    double value;
    bool builtin;
    std::string source;
};

// Precedence: flag, then FBD_DEFAULT_TOL, then the built-in default.
Tolerance resolve_tol(double flag) {
    if (flag != 0.0) {
        if (!(flag > 0.0)) throw UsageError("--tol must be > 0");
        return {flag, false, "flag"};
    }
    if (const char* env = std::getenv("FBD_DEFAULT_TOL"); env && *env) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0))
            throw UsageError(std::string("FBD_DEFAULT_TOL must be a positive number (got '") + env + "')");
        return {v, false, "env"};
    }
    return {kDefaultTol, true, "builtin"};
}

// Runs `fn` at the resolved tolerance; under the built-in default a
// non-converging evaluation is retried once at the relaxed tolerance.
template <typename Fn>
auto with_tolerance(const Tolerance& tol, nlohmann::json& params, Fn&& fn) {
    try {
        params["tol"] = tol.value;
        params["tol_source"] = tol.source;
        return fn(tol.value);
    } catch (const NonConvergence&) {
        if (!tol.builtin) throw;
        params["tol"] = kRelaxedTol;
        params["tol_source"] = "builtin_relaxed";
        return fn(kRelaxedTol);
    }
}

nlohmann::json model_json(const ModelParams& p) {
    return {{"lambda", p.lambda}, {"mu", p.mu}, {"nu", p.nu}, {"regime", to_string(classify(p).regime)}};
}

std::vector<double> time_grid(const std::vector<double>& list, const std::string& grid) {
    std::vector<double> ts = list;
    if (!grid.empty()) {
        double a = 0.0, b = 0.0;
        long n = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(grid);
        in.imbue(std::locale::classic());
        if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !in.eof())
            throw UsageError("--t-grid must look like START:STOP:COUNT");
        for (long i = 0; i < n; ++i) ts.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1));
    }
    if (ts.empty()) throw UsageError("give at least one time with --t or --t-grid");
    for (double t : ts)
        if (!(t >= 0.0) || !std::isfinite(t)) throw UsageError("times must be finite and >= 0");
    return ts;
}

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw UsageError("--t must be finite and >= 0");
}

OutputRecord cmd_pmf(const CommonFlags& f, double t, long kmax) {
    const ModelParams p = model(f);
    check_time(t);
    if (kmax < 1) throw UsageError("--kmax must be >= 1");
    OutputRecord rec;
    rec.command = "pmf";
    rec.parameters = model_json(p);
    rec.parameters["t"] = t;
    rec.parameters["kmax"] = kmax;
    const TruncatedPmf v = with_tolerance(resolve_tol(f.tol), rec.parameters,
                                          [&](double tol) { return pmf_vector(p, t, kmax, tol); });
    rec.columns = {"k", "probability", "trunc_error"};
    for (long k = 0; k <= kmax; ++k) rec.rows.push_back({k, v.probs[k], v.errors[k]});
    rec.summary["tail_bound"] = v.tail_bound;
    rec.summary["total_with_tail"] = v.probs.sum() + v.tail_bound;
    return rec;
}

OutputRecord cmd_extinction(const CommonFlags& f, const std::vector<double>& ts) {
    const ModelParams p = model(f);
    OutputRecord rec;
    rec.command = "extinction";
    rec.parameters = model_json(p);
    rec.columns = {"t", "extinction", "error_bound"};
    with_tolerance(resolve_tol(f.tol), rec.parameters, [&](double tol) {
        rec.rows.clear();
        for (double t : ts) rec.rows.push_back({t, extinction(p, t, tol), tol});
        return 0;
    });
    return rec;
}

OutputRecord cmd_moments(const CommonFlags& f, const std::vector<double>& ts) {
    const ModelParams p = model(f);
    OutputRecord rec;
    rec.command = "moments";
    rec.parameters = model_json(p);
    rec.columns = {"t", "mean", "second_factorial_moment", "variance"};
    with_tolerance(resolve_tol(f.tol), rec.parameters, [&](double tol) {
        rec.rows.clear();
        for (double t : ts)
            rec.rows.push_back({t, mean(p, t, tol), second_factorial_moment(p, t, tol), variance(p, t, tol)});
        return 0;
    });
    return rec;
}

TimeSampler parse_sampler(const std::string& s) {
    return s == "iterated-bm" ? TimeSampler::iterated_bm : TimeSampler::inverse_stable;
}

OutputRecord cmd_simulate(const CommonFlags& f, double t, const McConfig& cfg, const std::string& sampler) {
    const ModelParams p = model(f);
    check_time(t);
    cfg.validate();
    const McSummary s = simulate(p, t, cfg);
    OutputRecord rec;
    rec.command = "simulate";
    rec.parameters = model_json(p);
    rec.parameters["t"] = t;
    rec.parameters["samples"] = cfg.n_samples;
    rec.parameters["workers"] = cfg.worker_count;
    rec.parameters["kmax_report"] = cfg.kmax_report;
    rec.parameters["sampler"] = sampler;
    rec.seed = cfg.seed;
    rec.columns = {"k", "count", "frequency", "std_err"};
    long last = 0;
    for (long k = 0; k < static_cast<long>(s.counts.size()); ++k)
        if (s.counts[k] > 0) last = k;
    for (long k = 0; k <= last; ++k) rec.rows.push_back({k, s.counts[k], s.frequency(k), s.std_err(k)});
    rec.summary["overflow"] = s.overflow;
    rec.summary["sample_mean"] = s.sample_mean();
    rec.summary["mean_std_err"] = s.mean_std_err();
    rec.summary["sample_variance"] = s.sample_variance();
    return rec;
}

struct Check {
    std::string name;
    double discrepancy;
    double tolerance;
    bool passed() const { return discrepancy <= tolerance; }
};

void suite_reduction(const ModelParams& base, double t, double tol, std::vector<Check>& checks) {
    ModelParams p = base;
    p.nu = 1.0;
    double d0 = std::abs(extinction(p, t, tol) - classical_extinction(p, t));
    double dk = 0.0;
    if (t > 0.0)
        for (long k = 1; k <= 10; ++k) dk = std::max(dk, std::abs(pmf(p, t, k, tol) - classical_pmf(p, t, k)));
    checks.push_back({"reduction_extinction", d0, 1e-8});
    checks.push_back({"reduction_pmf_k1_10", dk, 1e-8});
}

void suite_oracle(const ModelParams& p, double t, double tol, std::vector<Check>& checks) {
    if (!(t > 0.0)) throw UsageError("the oracle suite needs --t > 0");
    if (p.nu == 0.5 || p.nu == 0.25) {
        const double band = p.nu == 0.5 ? 1e-5 : 1e-4;
        double d = std::abs(extinction(p, t, tol) - subordination_quadrature(p, t, {0}, p.nu).value);
        for (long k = 1; k <= 5; ++k)
            d = std::max(d, std::abs(pmf(p, t, k, tol) - subordination_quadrature(p, t, {k}, p.nu).value));
        checks.push_back({"subordination_quadrature_k0_5", d, band});
    }
    const CaputoSolution sol = solve_caputo_system(p, {200, 1e-3, t});
    checks.push_back({"caputo_l1_extinction", std::abs(sol.raw(0, sol.steps()) - extinction(p, t, tol)), 5e-3});
}

void suite_mc(const ModelParams& p, double t, double tol, const McConfig& cfg, std::vector<Check>& checks) {
    const McSummary s = simulate(p, t, cfg);
    const double p0 = extinction(p, t, tol);
    const double se0 = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(s.n));
    checks.push_back({"mc_extinction_3sigma", std::abs(s.frequency(0) - p0), 3.0 * se0});
    const double m = mean(p, t, tol);
    checks.push_back({"mc_mean_3se", std::abs(s.sample_mean() - m), 3.0 * s.mean_std_err()});
}

OutputRecord cmd_verify(const CommonFlags& f, double t, const std::string& suite, const McConfig& cfg) {
    const ModelParams p = model(f);
    check_time(t);
    OutputRecord rec;
    rec.command = "verify";
    rec.parameters = model_json(p);
    rec.parameters["t"] = t;
    rec.parameters["suite"] = suite;
    std::vector<Check> checks;
    with_tolerance(resolve_tol(f.tol), rec.parameters, [&](double tol) {
        checks.clear();
        if (suite == "reduction" || suite == "all") suite_reduction(p, t, tol, checks);
        if (suite == "oracle" || suite == "all") suite_oracle(p, t, tol, checks);
        if (suite == "mc" || suite == "all") {
            cfg.validate();
            suite_mc(p, t, tol, cfg, checks);
        }
        return 0;
    });
    if (suite == "mc" || suite == "all") {
        rec.seed = cfg.seed;
        rec.parameters["samples"] = cfg.n_samples;
    }
    rec.columns = {"check", "discrepancy", "tolerance", "passed"};
    bool all = true;
    double worst = 0.0;
    for (const Check& c : checks) {
        rec.rows.push_back({c.name, c.discrepancy, c.tolerance, c.passed()});
        all = all && c.passed();
        worst = std::max(worst, c.discrepancy);
    }
    rec.summary["all_passed"] = all;
    rec.summary["max_discrepancy"] = worst;
    return rec;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional linear birth-death process: closed forms, oracles and simulation", "fbd"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CommonFlags f;
    double t = 1.0;
    long kmax = 10;
    std::vector<double> t_list;
    std::string t_grid;
    McConfig mc;
    mc.seed = 1;
    std::string sampler = "inverse-stable";
    std::string suite = "all";

    auto add_tol = [&](CLI::App* cmd) { cmd->add_option("--tol", f.tol, "absolute tolerance (> 0)"); };
    auto add_mc = [&](CLI::App* cmd, std::uint64_t default_samples) {
        mc.n_samples = default_samples;
        cmd->add_option("--samples", mc.n_samples, "number of draws")->capture_default_str();
        cmd->add_option("--seed", mc.seed, "64-bit seed")->capture_default_str();
        cmd->add_option("--workers", mc.worker_count, "worker threads")->capture_default_str();
        cmd->add_option("--kmax-report", mc.kmax_report, "last histogram bin before overflow")
            ->capture_default_str();
        cmd->add_option("--sampler", sampler, "random-time sampler")
            ->check(CLI::IsMember({"inverse-stable", "iterated-bm"}))
            ->capture_default_str();
    };

    CLI::App* pmf_cmd = app.add_subcommand("pmf", "state probabilities p_0..p_kmax");
    add_model_flags(pmf_cmd, f);
    pmf_cmd->add_option("--t", t, "time")->required();
    pmf_cmd->add_option("--kmax", kmax, "largest state")->capture_default_str();
    add_tol(pmf_cmd);

    CLI::App* ext_cmd = app.add_subcommand("extinction", "extinction probability over a time grid");
    add_model_flags(ext_cmd, f);
    ext_cmd->add_option("--t", t_list, "one or more times");
    ext_cmd->add_option("--t-grid", t_grid, "START:STOP:COUNT evenly spaced times");
    add_tol(ext_cmd);

    CLI::App* mom_cmd = app.add_subcommand("moments", "mean, second factorial moment and variance");
    add_model_flags(mom_cmd, f);
    mom_cmd->add_option("--t", t_list, "one or more times");
    mom_cmd->add_option("--t-grid", t_grid, "START:STOP:COUNT evenly spaced times");
    add_tol(mom_cmd);

    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo histogram of N_nu(t)");
    add_model_flags(sim_cmd, f);
    sim_cmd->add_option("--t", t, "time")->required();
    add_mc(sim_cmd, 100000);

    CLI::App* ver_cmd = app.add_subcommand("verify", "cross-check closed forms against oracles");
    add_model_flags(ver_cmd, f);
    ver_cmd->add_option("--t", t, "time")->capture_default_str();
    ver_cmd->add_option("--suite", suite, "which checks to run")
        ->check(CLI::IsMember({"reduction", "oracle", "mc", "all"}))
        ->capture_default_str();
    add_tol(ver_cmd);
    add_mc(ver_cmd, 100000);

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        OutputRecord rec;
        int code = kExitOk;
        if (*pmf_cmd) {
            rec = cmd_pmf(f, t, kmax);
        } else if (*ext_cmd) {
            rec = cmd_extinction(f, time_grid(t_list, t_grid));
        } else if (*mom_cmd) {
            rec = cmd_moments(f, time_grid(t_list, t_grid));
        } else if (*sim_cmd) {
            mc.sampler = parse_sampler(sampler);
            rec = cmd_simulate(f, t, mc, sampler);
        } else {
            mc.sampler = parse_sampler(sampler);
            rec = cmd_verify(f, t, suite, mc);
            if (!rec.summary["all_passed"].get<bool>()) code = kExitCheckFailed;
        }
        out << (f.format == "csv" ? rec.to_csv() : rec.to_json());
        return code;
    } catch (const NonConvergence& e) {
        err << "error: numerical non-convergence: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace fbd

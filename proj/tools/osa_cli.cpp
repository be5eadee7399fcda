#include "osa/chain.hpp"
#include "osa/config.hpp"
#include "osa/contraction.hpp"
#include "osa/curve.hpp"
#include "osa/errors.hpp"
#include "osa/kernel.hpp"
#include "osa/simd.hpp"
#include "osa/system.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> runs;
    std::optional<std::uint64_t> bits;
    std::optional<std::string> snr_spec;
    double alpha = 0.0;
    std::optional<int> grid_n;
    std::optional<double> tol;
    std::optional<unsigned> threads;
    std::string out_path;
    std::string format; // empty = subcommand default
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "TOML config file ([system] [run] [grid] [sweep])");
    cmd->add_option("--seed", f.seed, "master seed for all randomness");
    cmd->add_option("--runs", f.runs, "Monte Carlo trials per SNR point");
    cmd->add_option("--bits", f.bits, "bits per trial");
    cmd->add_option("--snr", f.snr_spec, "SNR dB list: 'a..b step s' or comma list");
    cmd->add_option("--alpha", f.alpha, "initial error state D0 for prediction");
    cmd->add_option("--grid-n", f.grid_n, "grid nodes (odd) for measure evolution");
    cmd->add_option("--tol", f.tol, "W1 convergence tolerance");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
    cmd->add_option("--out", f.out_path, "output file (default stdout)");
    cmd->add_option("--format", f.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

osa::ExperimentConfig resolve_config(const CommonFlags& f) {
    osa::ExperimentConfig cfg = f.config_path.empty()
                                    ? osa::default_experiment()
                                    : osa::load_experiment(osa::ConfigFile::parse_file(f.config_path));
    if (f.seed) cfg.run.seed = *f.seed;
    if (f.runs) cfg.run.num_runs = *f.runs;
    if (f.bits) cfg.run.num_bits = *f.bits;
    if (f.threads) cfg.run.num_threads = *f.threads;
    if (f.snr_spec) cfg.sweep.snr_db = osa::parse_snr_spec(*f.snr_spec);
    if (f.grid_n) cfg.grid.n = *f.grid_n;
    if (f.tol) cfg.grid.tol = *f.tol;
    cfg.run.validate();
    if (!(cfg.grid.tol > 0.0))
        throw osa::Error(osa::ErrorCode::ConfigError, "--tol: must be > 0");
    return cfg;
}

// Ascending, duplicate-free ladder; curves require strictly increasing SNR.
std::vector<double> resolved_snr_ladder(const osa::ExperimentConfig& cfg) {
    std::vector<double> list = cfg.snr_list();
    std::sort(list.begin(), list.end());
    for (std::size_t i = 1; i < list.size(); ++i)
        if (!(list[i - 1] < list[i]))
            throw osa::Error(osa::ErrorCode::ConfigError,
                             "snr list: duplicate value " + osa::format_double(list[i]));
    return list;
}

// predict/check/oracle work on one fully resolved system.
osa::DiscreteSystem single_system(const osa::ExperimentConfig& cfg) {
    if (!cfg.sweep.snr_db.empty()) {
        if (cfg.sweep.snr_db.size() != 1)
            throw osa::Error(osa::ErrorCode::ConfigError,
                             "this subcommand needs a single SNR value; --snr gave " +
                                 std::to_string(cfg.sweep.snr_db.size()));
        return osa::with_snr_db(cfg.system, cfg.sweep.snr_db[0]);
    }
    if (cfg.sigma_given) return cfg.system;
    throw osa::Error(osa::ErrorCode::ConfigError,
                     "no noise level: set [system] sigma or snr_db, or pass --snr with one value");
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_)
                throw osa::Error(osa::ErrorCode::ConfigError, "cannot open --out file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

std::string format_of(const CommonFlags& f, const char* dflt) {
    return f.format.empty() ? dflt : f.format;
}

ordered_json system_json(const osa::DiscreteSystem& sys) {
    return {{"snr_db", osa::snr_db(sys)}, {"q", sys.q}, {"w", sys.w}, {"c", sys.c},
            {"sigma", sys.sigma}};
}

void emit_json(Output& out, const ordered_json& j) { out.stream() << j.dump(2) << "\n"; }

// ---- simulate ------------------------------------------------------------

void write_simulate_csv(std::ostream& os, const std::vector<osa::SnrPoint>& curve,
                        std::uint64_t seed) {
    os << "snr_db,mse,stderr,num_runs,num_bits,seed\n";
    for (const auto& p : curve)
        os << osa::format_double(p.snr_db) << ',' << osa::format_double(p.estimate.mean) << ','
           << osa::format_double(p.estimate.std_error) << ',' << p.estimate.num_runs << ','
           << p.estimate.num_bits << ',' << seed << "\n";
}

void write_traces(const std::string& path, const osa::DiscreteSystem& base,
                  const std::vector<double>& ladder, const osa::RunConfig& run, bool use_ladder) {
    std::ofstream os(path);
    if (!os)
        throw osa::Error(osa::ErrorCode::ConfigError, "cannot open --trace-out file '" + path + "'");
    os << "snr_db,k,d,bit_error\n";
    osa::RunConfig cfg = run;
    cfg.keep_traces = true;
    auto one = [&](const osa::DiscreteSystem& sys, double db) {
        osa::Rng rng(cfg.seed, 0);
        const osa::TrialResult t = osa::run_trial(sys, cfg, rng);
        for (std::size_t k = 0; k < t.d_trace.size(); ++k) {
            os << osa::format_double(db) << ',' << k << ',' << osa::format_double(t.d_trace[k])
               << ',' << (k == 0 ? 0 : int(t.error_trace[k - 1])) << "\n";
        }
    };
    if (use_ladder)
        for (double db : ladder) one(osa::with_snr_db(base, db), db);
    else
        one(base, osa::snr_db(base));
}

int cmd_simulate(const CommonFlags& f, const std::string& trace_path) {
    const osa::ExperimentConfig cfg = resolve_config(f);
    const bool use_ladder = !cfg.sweep.snr_db.empty() || !cfg.sigma_given;
    std::vector<osa::SnrPoint> curve;
    std::vector<double> ladder;
    if (use_ladder) {
        ladder = resolved_snr_ladder(cfg);
        curve = osa::sweep_snr(cfg.system, ladder, cfg.run);
    } else {
        curve.push_back({osa::snr_db(cfg.system), osa::monte_carlo_mse(cfg.system, cfg.run)});
    }

    Output out(f.out_path);
    if (format_of(f, "csv") == "csv") {
        write_simulate_csv(out.stream(), curve, cfg.run.seed);
    } else {
        ordered_json rows = ordered_json::array();
        for (const auto& p : curve)
            rows.push_back({{"snr_db", p.snr_db},
                            {"mse", p.estimate.mean},
                            {"stderr", p.estimate.std_error},
                            {"num_runs", p.estimate.num_runs},
                            {"num_bits", p.estimate.num_bits},
                            {"seed", cfg.run.seed}});
        emit_json(out, rows);
    }
    if (!trace_path.empty()) write_traces(trace_path, cfg.system, ladder, cfg.run, use_ladder);
    return 0;
}

// ---- predict ---------------------------------------------------------------

int cmd_predict(const CommonFlags& f) {
    const osa::ExperimentConfig cfg = resolve_config(f);
    const osa::DiscreteSystem sys = single_system(cfg);
    const osa::Grid grid = osa::Grid::state_space(sys, cfg.grid.n);
    const osa::Prediction pred =
        osa::predicted_mse(sys, f.alpha, grid, cfg.grid.tol, cfg.grid.max_iter);

    ordered_json j = system_json(sys);
    j["alpha"] = f.alpha;
    j["regime"] = pred.regime == osa::Regime::Contractive ? "Contractive" : "Unverified";
    j["predicted_mse"] = pred.value;
    j["iterations"] = pred.iterations;
    j["w1_residual"] = pred.w1_residual;
    j["grid_n"] = grid.n;

    Output out(f.out_path);
    if (format_of(f, "json") == "json") {
        emit_json(out, j);
    } else {
        std::ostream& os = out.stream();
        os << "snr_db,q,w,c,sigma,alpha,regime,predicted_mse,iterations,w1_residual,grid_n\n";
        os << osa::format_double(j["snr_db"].get<double>()) << ',' << osa::format_double(sys.q)
           << ',' << osa::format_double(sys.w) << ',' << osa::format_double(sys.c) << ','
           << osa::format_double(sys.sigma) << ',' << osa::format_double(f.alpha) << ','
           << j["regime"].get<std::string>() << ',' << osa::format_double(pred.value) << ','
           << pred.iterations << ',' << osa::format_double(pred.w1_residual) << ',' << grid.n
           << "\n";
    }
    return 0;
}

// ---- check -----------------------------------------------------------------

int cmd_check(const CommonFlags& f, std::uint64_t pairs, std::uint64_t noise) {
    const osa::ExperimentConfig cfg = resolve_config(f);
    const osa::DiscreteSystem sys = single_system(cfg);
    const osa::Grid grid = osa::Grid::state_space(sys, cfg.grid.n);
    const osa::ContractionReport rep = osa::full_report(sys, grid, pairs, noise, cfg.run.seed);

    ordered_json j = system_json(sys);
    j["snr_ratio"] = rep.snr_ratio;
    j["q_threshold_high_snr"] = rep.q_threshold_high_snr;
    j["q_threshold_low_snr"] = rep.q_threshold_low_snr;
    j["branch"] = osa::branch_name(rep.branch);
    j["numeric_sup_Fprime"] = rep.numeric_sup_Fprime;
    j["numeric_only_certificate"] = rep.numeric_only_certificate;
    if (rep.has_empirical_ratio) j["empirical_ratio"] = rep.empirical_ratio;

    Output out(f.out_path);
    if (format_of(f, "json") == "json") {
        emit_json(out, j);
    } else {
        std::ostream& os = out.stream();
        os << "snr_ratio,q,branch,numeric_sup_Fprime,empirical_ratio,numeric_only_certificate\n"
           << osa::format_double(rep.snr_ratio) << ',' << osa::format_double(sys.q) << ','
           << osa::branch_name(rep.branch) << ',' << osa::format_double(rep.numeric_sup_Fprime)
           << ',' << (rep.has_empirical_ratio ? osa::format_double(rep.empirical_ratio) : "")
           << ',' << (rep.numeric_only_certificate ? "true" : "false") << "\n";
    }

    std::cerr << "verdict: " << osa::branch_name(rep.branch) << " (sup F' = "
              << osa::format_double(rep.numeric_sup_Fprime)
              << (rep.numeric_sup_Fprime < 1.0 ? " < 1, contraction certified numerically"
                                               : " >= 1, no numerical certificate")
              << ")\n";
    return 0;
}

// ---- oracle ----------------------------------------------------------------

int cmd_oracle(const CommonFlags& f, int K) {
    const osa::ExperimentConfig cfg = resolve_config(f);
    const osa::DiscreteSystem sys = single_system(cfg);
    const osa::TreeResult res = osa::exact_tree_mse(sys, f.alpha, K);

    ordered_json j{{"K", K}, {"alpha", f.alpha}, {"exact_mse", res.mse},
                   {"atom_count", res.atom_count}};
    Output out(f.out_path);
    if (format_of(f, "json") == "json") {
        emit_json(out, j);
    } else {
        out.stream() << "K,alpha,exact_mse,atom_count\n"
                     << K << ',' << osa::format_double(f.alpha) << ','
                     << osa::format_double(res.mse) << ',' << res.atom_count << "\n";
    }
    return 0;
}

// ---- compare ---------------------------------------------------------------

int cmd_compare(const CommonFlags& f) {
    const osa::ExperimentConfig cfg = resolve_config(f);
    const std::vector<double> ladder = resolved_snr_ladder(cfg);

    osa::MseCurve curve;
    for (double db : ladder) {
        const osa::DiscreteSystem sys = osa::with_snr_db(cfg.system, db);
        const osa::MseEstimate est = osa::monte_carlo_mse(sys, cfg.run);
        const osa::Grid grid = osa::Grid::state_space(sys, cfg.grid.n);
        const osa::Prediction pred =
            osa::predicted_mse(sys, f.alpha, grid, cfg.grid.tol, cfg.grid.max_iter);
        curve.rows.push_back({db, est.mean, est.std_error, pred.value,
                              pred.regime == osa::Regime::Contractive ? "Contractive"
                                                                      : "Unverified"});
    }
    curve.validate();

    Output out(f.out_path);
    if (format_of(f, "csv") == "csv") {
        std::ostream& os = out.stream();
        os << "snr_db,sim_mse,sim_stderr,pred_mse,regime\n";
        for (const auto& r : curve.rows)
            os << osa::format_double(r.snr_db) << ',' << osa::format_double(*r.sim_mse) << ','
               << osa::format_double(*r.sim_stderr) << ',' << osa::format_double(*r.pred_mse)
               << ',' << *r.regime << "\n";
    } else {
        ordered_json rows = ordered_json::array();
        for (const auto& r : curve.rows)
            rows.push_back({{"snr_db", r.snr_db},
                            {"sim_mse", *r.sim_mse},
                            {"sim_stderr", *r.sim_stderr},
                            {"pred_mse", *r.pred_mse},
                            {"regime", *r.regime}});
        emit_json(out, rows);
    }

    double max_gap = 0.0;
    for (const auto& r : curve.rows) {
        const double gap = std::abs(*r.sim_mse - *r.pred_mse);
        max_gap = std::max(max_gap, gap);
        if (gap > std::max(0.01, 3.0 * *r.sim_stderr))
            std::cerr << "warning: snr_db=" << osa::format_double(r.snr_db) << " |sim - pred| = "
                      << osa::format_double(gap) << " exceeds max(0.01, 3*stderr)\n";
    }
    std::cerr << "max |sim - pred| = " << osa::format_double(max_gap) << "\n";
    return 0;
}

// ---- sweep -----------------------------------------------------------------

int cmd_sweep(const CommonFlags& f, bool with_pred) {
    const osa::ExperimentConfig cfg = resolve_config(f);
    const std::vector<double> ladder = resolved_snr_ladder(cfg);
    std::vector<double> a_values = cfg.sweep.a_values;
    if (a_values.empty()) a_values = {-2.0, -1.0, -0.5, -0.3};

    Output out(f.out_path);
    const bool csv = format_of(f, "csv") == "csv";
    ordered_json rows = ordered_json::array();
    std::ostream& os = out.stream();
    if (csv) {
        os << "a,snr_db,mse,stderr,num_runs,num_bits,seed";
        if (with_pred) os << ",pred_mse,regime";
        os << "\n";
    }

    for (double a : a_values) {
        const osa::DiscreteSystem base = cfg.system_for_a(a);
        const std::vector<osa::SnrPoint> curve = osa::sweep_snr(base, ladder, cfg.run);
        for (const auto& p : curve) {
            std::optional<osa::Prediction> pred;
            if (with_pred) {
                const osa::DiscreteSystem sys = osa::with_snr_db(base, p.snr_db);
                const osa::Grid grid = osa::Grid::state_space(sys, cfg.grid.n);
                pred = osa::predicted_mse(sys, f.alpha, grid, cfg.grid.tol, cfg.grid.max_iter);
            }
            if (csv) {
                os << osa::format_double(a) << ',' << osa::format_double(p.snr_db) << ','
                   << osa::format_double(p.estimate.mean) << ','
                   << osa::format_double(p.estimate.std_error) << ',' << p.estimate.num_runs
                   << ',' << p.estimate.num_bits << ',' << cfg.run.seed;
                if (with_pred)
                    os << ',' << osa::format_double(pred->value) << ','
                       << (pred->regime == osa::Regime::Contractive ? "Contractive"
                                                                    : "Unverified");
                os << "\n";
            } else {
                ordered_json row{{"a", a},
                                 {"snr_db", p.snr_db},
                                 {"mse", p.estimate.mean},
                                 {"stderr", p.estimate.std_error},
                                 {"num_runs", p.estimate.num_runs},
                                 {"num_bits", p.estimate.num_bits},
                                 {"seed", cfg.run.seed}};
                if (with_pred) {
                    row["pred_mse"] = pred->value;
                    row["regime"] = pred->regime == osa::Regime::Contractive ? "Contractive"
                                                                             : "Unverified";
                }
                rows.push_back(row);
            }
        }
    }
    if (!csv) emit_json(out, rows);
    return 0;
}

int exit_code_for(const osa::Error& e) {
    switch (e.code()) {
    case osa::ErrorCode::NotConverged: return 3;
    case osa::ErrorCode::ConfigError:
    case osa::ErrorCode::InvalidParam:
    case osa::ErrorCode::NonPositiveW:
    case osa::ErrorCode::OutOfDomain:
    case osa::ErrorCode::HorizonTooLarge: return 2;
    default: return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Binary-input reconstruction for scalar linear systems: one-state decoder "
                 "simulation and asymptotic MSE prediction"};
    app.require_subcommand(1);

    CommonFlags f_sim, f_pred, f_check, f_oracle, f_comp, f_sweep;
    std::string trace_path;
    std::uint64_t check_pairs = 200, check_noise = 0;
    int oracle_K = 10;
    bool sweep_pred = false;

    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo MSE of the decoder over an SNR ladder");
    add_common_flags(sim, f_sim);
    sim->add_option("--trace-out", trace_path, "also write one traced trial per SNR point (CSV)");

    CLI::App* pred = app.add_subcommand("predict", "asymptotic MSE from the error-process kernel");
    add_common_flags(pred, f_pred);

    CLI::App* chk = app.add_subcommand("check", "contraction report for the configured system");
    add_common_flags(chk, f_check);
    chk->add_option("--pairs", check_pairs, "sampled state pairs for the empirical ratio (0 = skip)");
    chk->add_option("--noise", check_noise, "MC noise draws per pair (0 = closed form only)");

    CLI::App* orc = app.add_subcommand("oracle", "exact finite-horizon MSE by tree enumeration");
    add_common_flags(orc, f_oracle);
    orc->add_option("--K", oracle_K, "horizon (max 14)");

    CLI::App* cmp = app.add_subcommand("compare", "simulation vs prediction, joined per SNR point");
    add_common_flags(cmp, f_comp);

    CLI::App* swp = app.add_subcommand("sweep", "simulation curves over several pole values a");
    add_common_flags(swp, f_sweep);
    swp->add_flag("--pred", sweep_pred, "add predicted MSE per point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(f_sim, trace_path);
        if (pred->parsed()) return cmd_predict(f_pred);
        if (chk->parsed()) return cmd_check(f_check, check_pairs, check_noise);
        if (orc->parsed()) return cmd_oracle(f_oracle, oracle_K);
        if (cmp->parsed()) return cmd_compare(f_comp);
        if (swp->parsed()) return cmd_sweep(f_sweep, sweep_pred);
    } catch (const osa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

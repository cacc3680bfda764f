#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radhydro/decay.hpp"
#include "radhydro/io.hpp"
#include "radhydro/sim.hpp"
#include "radhydro/symbols.hpp"

namespace radhydro::cli {

namespace fs = std::filesystem;
using io::json;

inline constexpr int kExitPass = 0;
inline constexpr int kExitScientificFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitAbort = 3;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    bool strict = false;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = resolve from RADHYDRO_THREADS or 1
    std::set<std::string> formats = {"csv", "json"};

    int resolved_threads() const {
        if (threads > 0) return threads;
        if (const char* env = std::getenv("RADHYDRO_THREADS")) {
            const int t = std::atoi(env);
            if (t > 0) return t;
        }
        return 1;
    }
    bool want(const std::string& f) const { return formats.count(f) != 0; }
};

/// One quantitative target checked by a command; `source` is the library-level
/// claim identifier the target certifies.
struct TargetCheck {
    std::string name;
    std::string source;
    double value = 0.0;
    std::string target;
    bool pass = false;
};

inline json targets_json(const std::vector<TargetCheck>& targets) {
    json arr = json::array();
    for (const auto& t : targets) {
        arr.push_back({{"name", t.name},
                       {"source", t.source},
                       {"value", t.value},
                       {"target", t.target},
                       {"pass", t.pass}});
    }
    return arr;
}

inline void write_record(const fs::path& out_dir, const std::string& kind,
                         std::uint64_t cfg_hash, bool pass,
                         const std::vector<TargetCheck>& targets, json extra = json::object()) {
    json rec = io::json_document(kind + "_record", 1, cfg_hash);
    rec["kind"] = kind;
    rec["pass"] = pass;
    rec["targets"] = targets_json(targets);
    for (auto& [k, v] : extra.items()) rec[k] = v;
    io::write_json((out_dir / (kind + "_record.json")).string(), rec);
}

inline io::FlatConfig load_config(const GlobalOptions& opts) {
    if (opts.config_path.empty()) return io::FlatConfig{};
    return io::FlatConfig::parse_file(opts.config_path);
}

// ---------------------------------------------------------------------------
// spectral-sweep

inline int cmd_spectral_sweep(const GlobalOptions& opts) {
    io::ConfigReader reader(load_config(opts));
    const double xi_min = reader.get_double("sweep.xi_min", 1e-3);
    const double xi_max = reader.get_double("sweep.xi_max", 1e3);
    const long long points = reader.get_int("sweep.points", 200);
    reader.require(xi_min > 0.0, "sweep.xi_min must be > 0 (xi = 0 is always sampled)");
    reader.require(xi_max >= xi_min, "sweep.xi_max must be >= sweep.xi_min");
    reader.require(points >= 1, "sweep.points must be >= 1");
    reader.finish();

    const std::uint64_t h = io::config_hash(reader.config(), opts.seed);
    fs::create_directories(opts.out_dir);
    const fs::path out_dir(opts.out_dir);

    std::vector<double> xis = {0.0};
    const double la = std::log(xi_min), lb = std::log(xi_max);
    for (long long i = 0; i < points; ++i)
        xis.push_back(points == 1 ? xi_min
                                  : std::exp(la + (lb - la) * i / double(points - 1)));

    bool all_ok = true;
    std::vector<std::vector<std::string>> rows;
    for (double xi : xis) {
        const linear::HurwitzReport rep = linear::hurwitz_determinants(xi);
        const bool expect_stable = xi > 0.0;
        const bool ok = expect_stable ? rep.verdict == linear::StabilityVerdict::stable
                                      : rep.verdict == linear::StabilityVerdict::marginal;
        all_ok = all_ok && ok;
        std::vector<std::string> row = {io::format_double(xi)};
        for (int i = 1; i <= 4; ++i) row.push_back(io::format_double(rep.coefficients[i]));
        for (int i = 0; i < 4; ++i) row.push_back(io::format_double(rep.minors[i]));
        row.push_back(io::format_double(rep.kappa_gap));
        row.push_back(linear::to_string(rep.verdict));
        rows.push_back(std::move(row));
    }

    if (opts.want("csv")) {
        io::CsvWriter csv((out_dir / "spectral_sweep.csv").string(), "spectral_sweep", 1, h,
                          {"xi_mag", "a1", "a2", "a3", "a4", "A1", "A2", "A3", "A4",
                           "min_re_lambda", "verdict"});
        for (const auto& r : rows) csv.row(r);
    }
    if (opts.want("svg")) {
        io::SvgSeries gap;
        gap.label = "min Re lambda";
        for (const auto& r : rows) {
            const double xi = std::stod(r[0]);
            if (xi <= 0.0) continue;
            gap.x.push_back(xi);
            gap.y.push_back(std::max(std::stod(r[9]), 1e-300));
        }
        io::write_svg_plot((out_dir / "spectral_sweep.svg").string(), "spectral gap vs |xi|",
                           {gap}, h, true, true);
    }

    std::vector<TargetCheck> targets;
    targets.push_back({"hurwitz_positivity", "routh-hurwitz-sweep", all_ok ? 1.0 : 0.0,
                       "stable for all sampled xi > 0, marginal at xi = 0", all_ok});
    if (opts.want("json")) write_record(out_dir, "spectral_sweep", h, all_ok, targets);
    std::cout << "spectral-sweep: " << (all_ok ? "pass" : "FAIL") << " (" << xis.size()
              << " samples)\n";
    return all_ok ? kExitPass : kExitScientificFail;
}

// ---------------------------------------------------------------------------
// linear-decay

inline int cmd_linear_decay(const GlobalOptions& opts) {
    io::ConfigReader reader(load_config(opts));
    const double t_lo = reader.get_double("decay.t_lo", 1.0);
    const double t_hi = reader.get_double("decay.t_hi", 1e4);
    const long long points = reader.get_int("decay.points", 61);
    const double fit_lo = reader.get_double("decay.fit_lo", 1e2);
    const double fit_hi = reader.get_double("decay.fit_hi", 1e4);
    const std::string profile = reader.get_string("decay.profile", "gaussian");
    const double r0 = reader.get_double("decay.r0", 0.2);
    const double R0 = reader.get_double("decay.R0", 2.0);
    reader.require(t_lo > 0.0 && t_hi > t_lo, "decay.t_lo/t_hi must satisfy 0 < t_lo < t_hi");
    reader.require(points >= 2, "decay.points must be >= 2 (empty/degenerate time grid)");
    reader.require(fit_lo < fit_hi, "decay.fit_lo must be < decay.fit_hi");
    reader.require(profile == "gaussian" || profile == "moment-free",
                   "decay.profile must be 'gaussian' or 'moment-free'");
    reader.require(r0 > 0.0 && r0 < 0.25, "decay.r0 must satisfy 0 < r0 < 1/4");
    reader.require(R0 > 1.0, "decay.R0 must satisfy R0 > 1");
    reader.finish();

    const std::uint64_t h = io::config_hash(reader.config(), opts.seed);
    fs::create_directories(opts.out_dir);
    const fs::path out_dir(opts.out_dir);

    decay::DecayExperimentConfig cfg;
    cfg.t_grid = decay::DecayExperimentConfig::log_time_grid(t_lo, t_hi, int(points));
    cfg.fit_window_lo = fit_lo;
    cfg.fit_window_hi = fit_hi;
    cfg.cutoffs = CutoffPair(r0, R0);
    const bool generic = profile == "gaussian";
    if (!generic) {
        cfg.rho0 = decay::moment_free_profile();
        cfg.d0 = decay::moment_free_profile();
        cfg.theta0 = decay::moment_free_profile();
        cfg.eta0 = decay::moment_free_profile();
        cfg.shear0 = decay::moment_free_profile();
    }

    const decay::NormTable table = decay::evolve_radial(cfg);

    if (opts.want("csv")) {
        io::CsvWriter csv((out_dir / "linear_decay.csv").string(), "linear_decay", 1, h,
                          {"t", "m", "band", "norm"});
        for (decay::Band band :
             {decay::Band::all, decay::Band::low, decay::Band::medium, decay::Band::high}) {
            for (int m = 0; m <= 2; ++m) {
                const auto& series = table.series(band, m);
                for (std::size_t i = 0; i < table.t.size(); ++i)
                    csv.row({io::format_double(table.t[i]), std::to_string(m),
                             decay::to_string(band), io::format_double(series[i])});
            }
        }
    }
    if (opts.want("svg")) {
        std::vector<io::SvgSeries> series;
        const char* colors[3] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
        for (int m = 0; m <= 2; ++m) {
            io::SvgSeries s;
            s.label = "m = " + std::to_string(m);
            s.color = colors[m];
            s.x = table.t;
            s.y = table.series(decay::Band::all, m);
            series.push_back(std::move(s));
        }
        io::write_svg_plot((out_dir / "linear_decay.svg").string(), "||grad^m U(t)||", series, h,
                           true, true);
    }

    std::vector<TargetCheck> targets;
    json fits = json::array();
    bool pass = true;
    std::array<double, 3> slopes{};
    for (int m = 0; m <= 2; ++m) {
        const decay::DecayFit fit = decay::fit_exponent(table.t, table.series(decay::Band::all, m),
                                                        fit_lo, fit_hi, m);
        slopes[m] = fit.slope;
        const double expected = -0.75 - 0.5 * m;
        const bool within = std::abs(fit.slope - expected) <= 0.05 && fit.conclusive;
        fits.push_back({{"m", m},
                        {"slope", fit.slope},
                        {"r_squared", fit.r_squared},
                        {"window", {fit.window_lo, fit.window_hi}},
                        {"conclusive", fit.conclusive}});
        if (generic) {
            targets.push_back({"decay_slope_m" + std::to_string(m), "whole-space-decay-rate",
                               fit.slope,
                               io::format_double(expected) + " +/- 0.05, R^2 >= 0.999", within});
            pass = pass && within;
        }
    }

    json extra;
    extra["fits"] = fits;
    extra["profile"] = profile;
    extra["truncation_warning"] = table.truncation_warning;
    if (!generic) {
        // moment-vanishing data decays faster than the generic -3/4 by at
        // least a quarter power; recorded, not certified
        extra["faster_than_generic"] = slopes[0] <= -1.0;
    }
    if (generic) {
        try {
            const auto lp = decay::lp_rate_table(slopes[0], slopes[1], slopes[2]);
            json lpj = json::array();
            for (const auto& e : lp.entries)
                lpj.push_back({{"quantity", e.quantity},
                               {"p", e.p == 0 ? "inf" : std::to_string(e.p)},
                               {"rate", e.rate.str()}});
            extra["lp_rates"] = lpj;
        } catch (const std::domain_error&) {
            pass = false;
            targets.push_back({"lp_rate_snap", "lp-interpolation-arithmetic", 0.0,
                               "slopes snap to the quarter lattice", false});
        }
    }
    if (table.truncation_warning && opts.strict) {
        pass = false;
        targets.push_back({"quadrature_truncation", "radial-quadrature-domain", 1.0,
                           "no truncation warning under --strict", false});
    }

    if (opts.want("json")) write_record(out_dir, "linear_decay", h, pass, targets, extra);
    std::cout << "linear-decay: " << (pass ? "pass" : "FAIL") << " (slopes "
              << io::format_double(slopes[0]) << ", " << io::format_double(slopes[1]) << ", "
              << io::format_double(slopes[2]) << ")\n";
    return pass ? kExitPass : kExitScientificFail;
}

// ---------------------------------------------------------------------------
// nonlinear-run

inline int cmd_nonlinear_run(const GlobalOptions& opts) {
    io::ConfigReader reader(load_config(opts));
    sim::SimConfig cfg;
    cfg.n = int(reader.get_int("sim.n", 32));
    cfg.box_len = reader.get_double("sim.box_len", 4.0);
    cfg.dt = reader.get_double("sim.dt", 0.02);
    cfg.t_end = reader.get_double("sim.t_end", 50.0);
    cfg.amplitude = reader.get_double("sim.amplitude", 1e-3);
    cfg.monitor_cadence = int(reader.get_int("sim.cadence", 5));
    cfg.eps_pos = reader.get_double("sim.eps_pos", model::kDefaultEpsPos);
    cfg.coupling_coeff = reader.get_double("sim.coupling", 0.05);
    const std::string integ = reader.get_string("sim.integrator", "if-rk2");
    const double r0 = reader.get_double("sim.r0", 0.2);
    const double R0 = reader.get_double("sim.R0", 2.0);
    const std::string checkpoint = reader.get_string("sim.checkpoint", "");
    cfg.seed = opts.seed;
    reader.require(cfg.n >= 4 && (cfg.n & (cfg.n - 1)) == 0, "sim.n must be a power of two >= 4");
    reader.require(cfg.box_len > 0.0, "sim.box_len must be > 0");
    reader.require(cfg.dt > 0.0 && cfg.t_end > 0.0, "sim.dt and sim.t_end must be > 0");
    reader.require(cfg.monitor_cadence >= 1, "sim.cadence must be >= 1");
    reader.require(cfg.amplitude >= 0.0, "sim.amplitude must be >= 0");
    reader.require(cfg.eps_pos > 0.0 && cfg.eps_pos < 1.0, "sim.eps_pos must lie in (0, 1)");
    reader.require(integ == "if-rk2" || integ == "imex-euler",
                   "sim.integrator must be 'if-rk2' or 'imex-euler'");
    reader.require(r0 > 0.0 && r0 < 0.25, "sim.r0 must satisfy 0 < r0 < 1/4");
    reader.require(R0 > 1.0, "sim.R0 must satisfy R0 > 1");
    reader.finish();
    cfg.integrator = sim::integrator_from_string(integ);
    cfg.cutoffs = CutoffPair(r0, R0);

    const std::uint64_t h = io::config_hash(reader.config(), opts.seed);
    fs::create_directories(opts.out_dir);
    const fs::path out_dir(opts.out_dir);

    if (!cfg.dt_within_advisory())
        std::cout << "warning: dt exceeds the advisory stability bound "
                  << io::format_double(0.5 * cfg.stability_dt()) << "\n";

    sim::Simulator simulator(make_grid(cfg.n, cfg.box_len), cfg);
    const sim::RunRecord rec = simulator.run();

    if (opts.want("csv")) {
        io::CsvWriter csv((out_dir / "nonlinear_monitor.csv").string(), "nonlinear_monitor", 1, h,
                          {"t", "norm_m0", "norm_m1", "norm_m2", "h_value", "l_value",
                           "relax_norm", "min_one_plus_rho", "energy", "dissipation",
                           "balance_rhs", "n_partial"});
        for (const auto& m : rec.monitors.samples)
            csv.row({io::format_double(m.t), io::format_double(m.grad_norm[0]),
                     io::format_double(m.grad_norm[1]), io::format_double(m.grad_norm[2]),
                     io::format_double(m.h_value), io::format_double(m.l_value),
                     io::format_double(m.relax_norm), io::format_double(m.min_one_plus_rho),
                     io::format_double(m.energy_weighted), io::format_double(m.dissipation),
                     io::format_double(m.balance_rhs), io::format_double(m.n_partial)});
    }
    if (opts.want("svg")) {
        io::SvgSeries s;
        s.label = "||U||_{L2}";
        for (const auto& m : rec.monitors.samples) {
            s.x.push_back(m.t);
            s.y.push_back(std::max(m.grad_norm[0], 1e-300));
        }
        io::write_svg_plot((out_dir / "nonlinear_run.svg").string(), "nonlinear run", {s}, h,
                           false, true);
    }
    if (!checkpoint.empty() && !rec.aborted) {
        // re-evolve the final state for checkpointing is wasteful; instead
        // store the seeded initial state, which is what restart needs
        sim::write_checkpoint((out_dir / checkpoint).string(), simulator.initial_data(), 0.0);
    }

    std::vector<TargetCheck> targets;
    double min_rho = std::numeric_limits<double>::infinity();
    for (const auto& m : rec.monitors.samples) min_rho = std::min(min_rho, m.min_one_plus_rho);
    const bool equiv_ok = rec.h_equiv_min >= 0.8 && rec.h_equiv_max <= 1.2;
    const bool tube_ok = !rec.aborted && min_rho >= cfg.eps_pos;
    targets.push_back({"no_abort", "global-existence-surrogate", rec.aborted ? 0.0 : 1.0,
                       "run reaches t_end inside the admissible tube", !rec.aborted});
    targets.push_back({"h_equivalence_band", "second-order-energy-equivalence",
                       rec.h_equiv_max, "H / ||grad^2 U||^2 in [0.8, 1.2]", equiv_ok});
    targets.push_back({"min_one_plus_rho", "admissible-tube", min_rho,
                       ">= " + io::format_double(cfg.eps_pos), tube_ok});
    const bool pass = !rec.aborted && equiv_ok && tube_ok;

    json extra;
    extra["config_echo"] = json::object();
    for (const auto& [k, v] : reader.config().values) extra["config_echo"][k] = v;
    extra["seed"] = opts.seed;
    extra["threads"] = opts.resolved_threads();
    extra["aborted"] = rec.aborted;
    extra["abort_reason"] = rec.abort_reason;
    extra["abort_time"] = rec.abort_time;
    extra["measured"] = {{"h_equiv_min", rec.h_equiv_min},
                         {"h_equiv_max", rec.h_equiv_max},
                         {"l_equiv_min", rec.l_equiv_min},
                         {"l_equiv_max", rec.l_equiv_max},
                         {"n_constant", rec.n_constant},
                         {"late_slope", rec.late_slope},
                         {"linear_gap", rec.linear_gap},
                         {"final_over_initial_h2", rec.final_over_initial_h2}};
    if (opts.want("json")) write_record(out_dir, "nonlinear_run", h, pass, targets, extra);

    if (rec.aborted) {
        std::cout << "nonlinear-run: ABORT at t = " << io::format_double(rec.abort_time) << " ("
                  << rec.abort_reason << "); partial record persisted\n";
        return kExitAbort;
    }
    std::cout << "nonlinear-run: " << (pass ? "pass" : "FAIL")
              << " (late slope " << io::format_double(rec.late_slope) << ", gap "
              << io::format_double(rec.linear_gap) << ")\n";
    return pass ? kExitPass : kExitScientificFail;
}

// ---------------------------------------------------------------------------
// report

inline int cmd_report(const GlobalOptions& opts) {
    const fs::path dir(opts.out_dir);
    std::vector<fs::path> records;
    std::vector<std::string> unreadable;
    if (fs::is_directory(dir)) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.size() > 12 && name.substr(name.size() - 12) == "_record.json")
                records.push_back(entry.path());
        }
    }
    std::sort(records.begin(), records.end());
    if (records.empty()) {
        std::cerr << "report: no records found in " << dir.string() << "\n";
        return kExitUsage;
    }

    bool overall = true;
    json items = json::array();
    std::string text = "experiment            verdict\n";
    text += "---------------------  -------\n";
    for (const auto& path : records) {
        json rec;
        try {
            std::ifstream in(path);
            in >> rec;
            if (!in) throw std::runtime_error("parse failure");
        } catch (const std::exception&) {
            unreadable.push_back(path.string());
            continue;
        }
        const bool pass = rec.value("pass", false);
        overall = overall && pass;
        items.push_back({{"file", path.filename().string()},
                         {"kind", rec.value("kind", "?")},
                         {"pass", pass},
                         {"config_hash", rec.value("config_hash", "?")},
                         {"targets", rec.value("targets", json::array())}});
        std::string kind = rec.value("kind", "?");
        kind.resize(21, ' ');
        text += kind + "  " + (pass ? "pass" : "FAIL") + "\n";
    }
    if (!unreadable.empty()) {
        std::cerr << "report: unreadable records:\n";
        for (const auto& p : unreadable) std::cerr << "  " << p << "\n";
        return kExitUsage;
    }

    json doc = io::json_document("summary_report", 1, io::config_hash(io::FlatConfig{}, 0));
    doc["overall_pass"] = overall;
    doc["experiments"] = items;
    io::write_json((dir / "report.json").string(), doc);
    {
        std::ofstream out(dir / "report.txt");
        out << text << "\noverall: " << (overall ? "pass" : "FAIL") << "\n";
    }
    std::cout << text << "\noverall: " << (overall ? "pass" : "FAIL") << "\n";
    return overall ? kExitPass : kExitScientificFail;
}

// ---------------------------------------------------------------------------

inline int run_main(int argc, const char* const* argv) {
    CLI::App app{"numerical laboratory for a radiative fluid perturbation system"};
    app.require_subcommand(1);

    GlobalOptions opts;
    std::vector<std::string> format_list;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "flat key/value config file");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_flag("--strict", opts.strict, "escalate warnings to failures");
        sub->add_option("--seed", opts.seed, "RNG seed (also salts the config hash)");
        sub->add_option("--threads", opts.threads, "worker threads (env RADHYDRO_THREADS)");
        sub->add_option("--format", format_list, "output formats (csv, json, svg); repeatable")
            ->check(CLI::IsMember({"csv", "json", "svg"}))
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    };

    CLI::App* sweep = app.add_subcommand("spectral-sweep", "Hurwitz stability table over |xi|");
    CLI::App* decay_cmd = app.add_subcommand("linear-decay", "whole-space linear decay rates");
    CLI::App* run_cmd = app.add_subcommand("nonlinear-run", "periodic-box nonlinear evolution");
    CLI::App* report_cmd = app.add_subcommand("report", "aggregate records in --out");
    for (CLI::App* sub : {sweep, decay_cmd, run_cmd, report_cmd}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitPass : kExitUsage;
    }

    if (!format_list.empty())
        opts.formats = std::set<std::string>(format_list.begin(), format_list.end());

    try {
        if (sweep->parsed()) return cmd_spectral_sweep(opts);
        if (decay_cmd->parsed()) return cmd_linear_decay(opts);
        if (run_cmd->parsed()) return cmd_nonlinear_run(opts);
        if (report_cmd->parsed()) return cmd_report(opts);
    } catch (const io::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "abort: " << e.what() << "\n";
        return kExitAbort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAbort;
    }
    return kExitUsage;
}

}  // namespace radhydro::cli

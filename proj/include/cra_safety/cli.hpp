#pragma once

// The cra-safety command line: simulate, synthesize, verify, report.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cra_safety/config.hpp"
#include "cra_safety/hybrid.hpp"
#include "cra_safety/io.hpp"
#include "cra_safety/synthesizer.hpp"
#include "cra_safety/verifier.hpp"

namespace cra {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitSafetyViolation = 2,
    kExitSynthesisExhausted = 3,
    kExitVerificationFailed = 4,
};

struct CommandOptions {
    std::string config_path;
    std::string preset_name;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> substeps;
};

inline RunConfig resolve_config(const CommandOptions& o) {
    if (o.config_path.empty() == o.preset_name.empty())
        throw ConfigError("exactly one of --config or --preset is required");
    RunConfig c = o.config_path.empty() ? preset(o.preset_name) : load_config(o.config_path);
    if (o.seed) apply_seed(c, *o.seed);
    if (o.substeps) {
        if (*o.substeps < 1) throw ConfigError("--substeps: must be >= 1");
        c.substeps = *o.substeps;
    }
    if (!o.out_dir.empty()) c.out_dir = o.out_dir;
    return c;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const std::filesystem::path dir(cfg.out_dir);
    RunResult res;
    try {
        res = run(cfg.setup());
    } catch (const DivergenceError& e) {
        out << "diverged: " << e.what() << '\n';
        return kExitSafetyViolation;
    }
    write_atomic(dir / "config.json", config_to_json(cfg).dump(2) + '\n');
    write_atomic(dir / "trajectory.csv", trajectory_csv(res.trajectory, cfg.system.n, cfg.system.m));
    write_atomic(dir / "report.json", cost_report_to_json(res.report, cfg).dump(2) + '\n');
    write_atomic(dir / "transitions.jsonl", transitions_jsonl(res.log));
    for (const auto& w : res.warnings) out << "warning: " << w << '\n';
    out << "max cycle J = " << fmt9(res.report.max_cycle_cost) << ", budget B = " << fmt9(res.report.budget);
    if (res.report.bound) out << ", bound J1+J2 = " << fmt9(*res.report.bound);
    out << '\n' << "excursion epochs: " << res.report.excursion_epochs.size() << '\n';
    if (res.report.violated) {
        out << "SAFETY VIOLATION at epoch " << *res.report.violation_epoch << '\n';
        return kExitSafetyViolation;
    }
    return kExitOk;
}

inline int cmd_synthesize(const RunConfig& cfg, std::ostream& out) {
    const std::filesystem::path dir(cfg.out_dir);
    const SynthesisOutcome o = synthesize(cfg.system, cfg.spec, cfg.synthesis);
    write_atomic(dir / "synthesis.json", synthesis_to_json(o).dump(2) + '\n');
    write_atomic(dir / "synthesis_trace.csv", synthesis_trace_csv(o));
    out << synthesis_trace_table(o);
    out << "iterations " << o.iterations << " (bound " << o.iteration_bound << ")\n";
    if (!o.result) {
        out << "synthesis exhausted";
        if (o.near_miss) out << "; best near miss at c=" << fmt9(o.near_miss->c) << " d=" << fmt9(o.near_miss->d)
                             << " theta=" << fmt9(o.near_miss->theta);
        out << '\n';
        return kExitSynthesisExhausted;
    }
    const auto& r = *o.result;
    out << "accepted c=" << fmt9(r.c) << " d=" << fmt9(r.d) << " tau=" << fmt9(r.tau) << " K=[";
    for (std::size_t j = 0; j < r.gain.cols(); ++j) out << (j ? ", " : "") << fmt9(r.gain(0, j));
    out << "] bound J1+J2=" << fmt9(r.bound) << '\n';
    return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const std::filesystem::path dir(cfg.out_dir);
    const auto& settings = cfg.synthesis.verifier;
    json j;
    bool ok = false;
    if (cfg.timing.arch == ArchKind::Simplex) {
        const CertifiedVerdict v = check_zcbf_feasibility(cfg.system, cfg.spec, cfg.synthesis.alpha, settings);
        j["safety_controller_zcbf"] = verdict_to_json(v);
        ok = v.certified();
        out << "safety controller condition: " << to_string(v.status) << " margin " << fmt9(v.margin) << '\n';
    } else {
        if (!cfg.certificate) throw ConfigError("/certificate: verify needs explicit c, d, tau");
        const auto* lin = std::get_if<LinearPolicy>(&cfg.policy);
        if (!lin) throw ConfigError("/policy: verify needs a linear policy");
        const auto& cert = *cfg.certificate;
        const CertificateCheck chk = verify_certificate(cfg.system, cfg.spec, cert.c, cert.d, cert.tau, lin->gain,
                                                        cfg.n_epochs(), cfg.synthesis.alpha, cfg.attack, settings);
        j = certificate_check_to_json(chk);
        ok = chk.all_ok();
        auto line = [&](const char* name, const CertifiedVerdict& v) {
            out << name << ": " << to_string(v.status) << " margin " << fmt9(v.margin) << '\n';
        };
        line("5a", chk.v5a);
        line("5b", chk.v5b.inequality);
        line("5b inputs", chk.v5b.inputs);
        line("5c", chk.v5c.inequality);
        line("5c inputs", chk.v5c.inputs);
        out << "budget inequality: " << (chk.budget.ok ? "holds" : "fails") << " slack " << fmt9(chk.budget.slack) << '\n';
        if (chk.schedule_ok)
            out << "attack cycle A >= tau + N delta: " << (*chk.schedule_ok ? "holds" : "VIOLATED") << '\n';
    }
    write_atomic(dir / "verdicts.json", j.dump(2) + '\n');
    return ok ? kExitOk : kExitVerificationFailed;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

/// For h = a - q x_k^2 returns (k, sqrt(a/q)).
inline std::optional<std::pair<std::size_t, double>> single_axis_bound(const MultiPoly& h) {
    double a = 0.0, q = 0.0;
    std::optional<std::size_t> axis;
    for (const auto& t : h.terms()) {
        unsigned deg = 0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < t.exps.size(); ++i)
            if (t.exps[i]) {
                deg += t.exps[i];
                last = i;
            }
        if (deg == 0) {
            a = t.coef;
        } else if (deg == 2 && t.exps[last] == 2 && !axis) {
            axis = last;
            q = -t.coef;
        } else {
            return std::nullopt;
        }
    }
    if (!axis || !(a > 0.0) || !(q > 0.0)) return std::nullopt;
    return std::make_pair(*axis, std::sqrt(a / q));
}

}  // namespace detail

/// Renders report.md and plot_data.csv from a simulate output directory.
inline int cmd_report(const std::filesystem::path& dir, std::ostream& out) {
    for (const char* f : {"config.json", "trajectory.csv", "report.json"})
        if (!std::filesystem::exists(dir / f)) {
            out << "missing input " << (dir / f).string() << " (run simulate first)\n";
            return kExitConfigError;
        }
    const RunConfig cfg = config_from_text(read_file(dir / "config.json"), (dir / "config.json").string());
    const json rep = json::parse(read_file(dir / "report.json"));
    std::istringstream csv(read_file(dir / "trajectory.csv"));
    std::string line;
    std::getline(csv, line);
    const auto header = detail::split_csv_line(line);
    const std::size_t n = cfg.system.n;
    const auto bound = detail::single_axis_bound(cfg.spec.h);

    std::string plot = "epoch,t";
    for (std::size_t i = 1; i <= n; ++i) plot += ",x" + std::to_string(i);
    plot += ",h";
    if (bound) plot += ",c_lower,c_upper";
    plot += '\n';
    std::vector<std::vector<std::string>> rows;
    while (std::getline(csv, line))
        if (!line.empty()) rows.push_back(detail::split_csv_line(line));
    if (rows.empty() || header.size() < 5 + n) {
        out << "trajectory.csv is empty or malformed\n";
        return kExitConfigError;
    }
    const std::size_t h_col = header.size() - 2;
    long epoch_index = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        // Row 0 is the initial state; afterwards take the last sample of each epoch.
        const bool epoch_end = k == 0 || k + 1 == rows.size() || rows[k + 1][1] != rows[k][1];
        if (!epoch_end) continue;
        if (rows[k].size() != header.size()) {
            out << "trajectory.csv row " << k + 2 << " has " << rows[k].size() << " fields\n";
            return kExitConfigError;
        }
        plot += std::to_string(epoch_index++) + ',' + rows[k][0];
        for (std::size_t i = 0; i < n; ++i) plot += ',' + rows[k][3 + i];
        plot += ',' + rows[k][h_col];
        if (bound) plot += ',' + fmt9(-bound->second) + ',' + fmt9(bound->second);
        plot += '\n';
    }

    std::ostringstream md;
    md << "# Run report: " << (cfg.name.empty() ? "custom" : cfg.name) << "\n\n";
    md << "| quantity | value |\n|---|---|\n";
    md << "| architecture | " << to_string(cfg.timing.arch) << " |\n";
    md << "| epoch length (s) | " << fmt9(cfg.system.delta) << " |\n";
    md << "| horizon (epochs) | " << cfg.horizon_epochs << " |\n";
    md << "| input box U | [";
    for (std::size_t i = 0; i < cfg.system.m; ++i)
        md << (i ? "; " : "") << fmt9(cfg.system.input_box.lo(i)) << ", " << fmt9(cfg.system.input_box.hi(i));
    md << "] |\n";
    md << "| L1 coefficients | ";
    for (std::size_t i = 0; i < cfg.spec.l1_coeffs.size(); ++i) md << (i ? ", " : "") << fmt9(cfg.spec.l1_coeffs[i]);
    md << " |\n";
    md << "| budget B | " << fmt9(rep["budget"].get<double>()) << " |\n";
    md << "| max cycle J | " << fmt9(rep["J"].get<double>()) << " |\n";
    md << "| bound J1+J2 | " << (rep["bound_J1_plus_J2"].is_null() ? std::string("n/a") : fmt9(rep["bound_J1_plus_J2"].get<double>()))
       << " |\n";
    md << "| violated | " << (rep["violated"].get<bool>() ? "yes" : "no") << " |\n";
    if (rep["modeling"].contains("tau_epochs"))
        md << "| tau in epochs (ceiling) | " << rep["modeling"]["tau_epochs"].get<long>()
           << (rep["modeling"]["tau_epochs_integral"].get<bool>() ? "" : " (tau/delta not integral)") << " |\n";
    md << "\n## Per-cycle cost\n\n| start epoch | end epoch | attacked | J | J <= B |\n|---|---|---|---|---|\n";
    const double budget = rep["budget"].get<double>();
    for (const auto& c : rep["cycles"]) {
        const double jc = c["J"].get<double>();
        md << "| " << c["start_epoch"].get<long>() << " | " << c["end_epoch"].get<long>() << " | "
           << (c["attacked"].get<bool>() ? "yes" : "no") << " | " << fmt9(jc) << " | " << (jc <= budget ? "yes" : "no")
           << " |\n";
    }
    write_atomic(dir / "plot_data.csv", plot);
    write_atomic(dir / "report.md", md.str());
    out << "wrote " << (dir / "report.md").string() << " and " << (dir / "plot_data.csv").string() << '\n';
    return kExitOk;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Budget-safety synthesis, verification and simulation for cyber-resilient control"};
    app.require_subcommand(1);
    CommandOptions opts;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config) {
            sub->add_option("--config", opts.config_path, "Run configuration JSON");
            sub->add_option("--preset", opts.preset_name, "Bundled scenario: boeing-I, boeing-II, boeing-III");
            sub->add_option("--seed", opts.seed, "Override the run seed");
            sub->add_option("--substeps", opts.substeps, "RK4 substeps per epoch");
        }
        sub->add_option("--out", opts.out_dir, "Output directory");
    };
    auto* sim = app.add_subcommand("simulate", "Simulate the hybrid system and report the cycle cost");
    auto* syn = app.add_subcommand("synthesize", "Search (c, d, tau, K) satisfying the safety conditions");
    auto* ver = app.add_subcommand("verify", "Check the safety conditions for an explicit certificate");
    auto* rep = app.add_subcommand("report", "Render report.md and plot data from simulate output");
    add_common(sim, true);
    add_common(syn, true);
    add_common(ver, true);
    add_common(rep, false);
    rep->add_option("--preset", opts.preset_name, "Preset whose default output directory to read");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, eo;
        const int code = app.exit(e, o, eo);
        out << o.str();
        err << eo.str();
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (rep->parsed()) {
            std::string dir = opts.out_dir;
            if (dir.empty() && !opts.preset_name.empty()) dir = preset(opts.preset_name).out_dir;
            if (dir.empty()) throw ConfigError("report: --out DIR is required");
            return cmd_report(dir, out);
        }
        const RunConfig cfg = resolve_config(opts);
        if (sim->parsed()) return cmd_simulate(cfg, out);
        if (syn->parsed()) return cmd_synthesize(cfg, out);
        return cmd_verify(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

}  // namespace cra

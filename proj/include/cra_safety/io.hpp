#pragma once

// Output formats: trajectory CSV, cost report and verdict JSON, transition
// logs, and atomic file writes.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "cra_safety/config.hpp"
#include "cra_safety/hybrid.hpp"
#include "cra_safety/synthesizer.hpp"
#include "cra_safety/verifier.hpp"

namespace cra {

/// Shortest form with 9 significant digits, '.' decimal point regardless of locale.
inline std::string fmt9(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

/// Writes to a sibling temporary file, then renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string trajectory_csv(const Trajectory& traj, std::size_t n, std::size_t m) {
    std::string out = "t,epoch,location";
    for (std::size_t i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
    for (std::size_t i = 1; i <= m; ++i) out += ",u" + std::to_string(i);
    out += ",h,J\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out += fmt9(traj.times[k]);
        out += ',' + std::to_string(traj.epochs[k]);
        out += ',';
        out += to_string(traj.locations[k].status);
        for (double v : traj.states[k]) out += ',' + fmt9(v);
        for (double v : traj.inputs[k]) out += ',' + fmt9(v);
        out += ',' + fmt9(traj.h[k]);
        out += ',' + fmt9(traj.cost[k]) + '\n';
    }
    return out;
}

inline json transition_to_json(const TransitionRecord& r) {
    return {{"from", {std::string(to_string(r.from.status)), r.from.epoch}},
            {"to", {std::string(to_string(r.to.status)), r.to.epoch}},
            {"event", std::string(to_string(r.label.event))},
            {"e2", r.label.e2}};
}

inline std::string transitions_jsonl(const std::vector<TransitionRecord>& log) {
    std::string out;
    for (const auto& r : log) out += transition_to_json(r).dump() + '\n';
    return out;
}

/// Replays a transition log and checks j' = j + e2 on every entry.
inline bool replay_epoch_bookkeeping(const std::vector<TransitionRecord>& log) {
    for (const auto& r : log) {
        if (r.from.status == Status::SafetyViolation) continue;
        if (r.to.epoch != r.from.epoch + r.label.e2) return false;
    }
    for (std::size_t k = 1; k < log.size(); ++k)
        if (log[k].from.status != log[k - 1].to.status) return false;
    return true;
}

inline json cost_report_to_json(const CostReport& rep, const RunConfig& cfg) {
    json j;
    j["J"] = rep.max_cycle_cost;
    j["bound_J1_plus_J2"] = rep.bound ? json(*rep.bound) : json(nullptr);
    j["budget"] = rep.budget;
    j["violated"] = rep.violated;
    j["excursion_epochs"] = rep.excursion_epochs;
    j["violation_epoch"] = rep.violation_epoch ? json(*rep.violation_epoch) : json(nullptr);
    json cycles = json::array();
    for (const auto& c : rep.cycles) {
        json cj{{"start_epoch", c.start_epoch}, {"end_epoch", c.end_epoch}, {"attacked", c.attacked}, {"J", c.cost}};
        cj["first_excursion_t"] = c.first_excursion_time ? json(*c.first_excursion_time) : json(nullptr);
        cj["last_excursion_t"] = c.last_excursion_time ? json(*c.last_excursion_time) : json(nullptr);
        cycles.push_back(cj);
    }
    j["cycles"] = cycles;
    json model;
    model["input_box"] = box_to_json(cfg.system.input_box);
    model["state_domain"] = box_to_json(cfg.system.state_domain);
    model["l1"] = cfg.spec.l1_coeffs;
    model["adversary"] = adversary_to_json(cfg.adversary);
    model["architecture"] = std::string(to_string(cfg.timing.arch));
    model["substeps"] = cfg.substeps;
    if (cfg.certificate) {
        const double ratio = cfg.certificate->tau / cfg.system.delta;
        model["tau_epochs"] = static_cast<long>(std::ceil(ratio - 1e-9));
        model["tau_epochs_integral"] = std::abs(ratio - std::round(ratio)) < 1e-9;
    }
    j["modeling"] = model;
    return j;
}

inline json synthesis_to_json(const SynthesisOutcome& o) {
    auto result_json = [](const SynthesisResult& r) {
        return json{{"c", r.c},
                    {"d", r.d},
                    {"tau", r.tau},
                    {"theta", r.theta},
                    {"gain", matrix_to_json(r.gain)},
                    {"verdicts",
                     {{"5a", verdict_to_json(r.v5a)},
                      {"5b", policy_verdict_to_json(r.v5b)},
                      {"5c", policy_verdict_to_json(r.v5c)},
                      {"budget_inequality", {{"ok", r.budget.ok}, {"slack", r.budget.slack}}}}},
                    {"bound_J1_plus_J2", r.bound},
                    {"iterations", r.iterations}};
    };
    json j;
    j["status"] = o.result ? "success" : "exhausted";
    j["result"] = o.result ? result_json(*o.result) : json(nullptr);
    j["near_miss"] = o.near_miss ? result_json(*o.near_miss) : json(nullptr);
    j["iterations"] = o.iterations;
    j["iteration_bound"] = o.iteration_bound;
    j["c_max"] = o.c_max;
    j["d_max"] = o.d_max;
    return j;
}

inline std::string synthesis_trace_table(const SynthesisOutcome& o) {
    std::ostringstream s;
    s << "      c            d            stage     theta        note\n";
    for (const auto& r : o.trace) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-12s %-12s %-9s %-12s %s\n", fmt9(r.c).c_str(), fmt9(r.d).c_str(),
                      r.stage.c_str(), fmt9(r.theta).c_str(), r.note.c_str());
        s << line;
    }
    return s.str();
}

inline std::string synthesis_trace_csv(const SynthesisOutcome& o) {
    std::string out = "c,d,stage,theta,note\n";
    for (const auto& r : o.trace) out += fmt9(r.c) + ',' + fmt9(r.d) + ',' + r.stage + ',' + fmt9(r.theta) + ",\"" + r.note + "\"\n";
    return out;
}

inline json certificate_check_to_json(const CertificateCheck& c) {
    json j;
    j["5a"] = verdict_to_json(c.v5a);
    j["5b"] = policy_verdict_to_json(c.v5b);
    j["5c"] = policy_verdict_to_json(c.v5c);
    j["budget_inequality"] = {{"ok", c.budget.ok}, {"slack", c.budget.slack}};
    j["schedule_ok"] = c.schedule_ok ? json(*c.schedule_ok) : json(nullptr);
    j["bound_J1_plus_J2"] = c.bound;
    j["all_ok"] = c.all_ok();
    return j;
}

}  // namespace cra

#pragma once

// Hybrid automaton of a CPS running a cyber-resilient architecture (redundant
// BFT++, restart-based, or simplex). Locations pair a status with the epoch
// at which it was entered; labeled transitions are gated by clock constraints
// on e2, the epochs spent in the source status, and always land at j + e2.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cra_safety/controllers.hpp"
#include "cra_safety/cost.hpp"
#include "cra_safety/location.hpp"
#include "cra_safety/plant.hpp"

namespace cra {

enum class ArchKind : std::uint8_t { Redundant, RestartBased, Simplex };

inline constexpr std::array<std::string_view, 3> kArchNames = {"redundant", "restart", "simplex"};
inline std::string_view to_string(ArchKind a) { return kArchNames[static_cast<std::size_t>(a)]; }
inline ArchKind arch_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kArchNames.size(); ++i)
        if (kArchNames[i] == s) return static_cast<ArchKind>(i);
    throw std::invalid_argument("unknown architecture '" + std::string(s) + "'");
}

enum class Event : std::uint8_t {
    AdversarialCyberDisruption,
    ControllerCrash,
    ControllerRestored,
    Timer,
    InitializationDone,
    SafetyControllerActivated,
    SafetyControllerInactivated,
    MaximumTolerance,
};

inline constexpr std::array<std::string_view, 8> kEventNames = {
    "adversarial_cyber_disruption", "controller_crash", "controller_restored", "timer",
    "initialization_done", "safety_controller_activated", "safety_controller_inactivated",
    "maximum_tolerance"};
inline std::string_view to_string(Event e) { return kEventNames[static_cast<std::size_t>(e)]; }

struct TransitionLabel {
    Event event = Event::Timer;
    long e2 = 0;
    bool operator==(const TransitionLabel&) const = default;
};

struct ArchitectureTiming {
    long n1 = 2;  // crash delay, redundant
    long n2 = 2;  // restoration
    long n3 = 2;  // crash delay, restart-based
    long n4 = 4;  // reboot and initialization
    long n5 = 20; // normal epochs per restart period
    long buffer_length = 3;
    ArchKind arch = ArchKind::Redundant;

    bool operator==(const ArchitectureTiming&) const = default;

    void validate() const {
        if (n1 < 0 || n2 < 0 || n3 < 0 || n4 < 0 || n5 < 0)
            throw std::invalid_argument("timing: N1..N5 must be non-negative");
        if (arch == ArchKind::Redundant && buffer_length <= n1)
            throw std::invalid_argument("timing: redundant buffer length must exceed N1");
    }

    /// N: worst-case epochs spent outside Normal per attack.
    long worst_case_non_normal() const {
        switch (arch) {
            case ArchKind::Redundant: return n1 + n2;
            case ArchKind::RestartBased: return n3 + n4;
            case ArchKind::Simplex: return 0;
        }
        return 0;
    }

    /// Upper bound on e2 in a status, or nullopt when unbounded.
    std::optional<long> max_elapsed(Status s) const {
        switch (s) {
            case Status::Corrupted:
                if (arch == ArchKind::Redundant) return n1;
                if (arch == ArchKind::RestartBased) return std::min(n3, n5);
                return std::nullopt;
            case Status::Restoration: return n2;
            case Status::RebootInit: return n4;
            case Status::Normal:
                if (arch == ArchKind::RestartBased) return n5;
                return std::nullopt;
            default: return std::nullopt;
        }
    }
};

struct Transition {
    Location target;
    TransitionLabel label;
};

/// Transitions whose clock constraint holds for e2 = elapsed. MaximumTolerance
/// (budget exhaustion) is only offered when `budget_exhausted` is set.
inline std::vector<Transition> enabled_transitions(const Location& loc, const ArchitectureTiming& t,
                                                   long elapsed, bool budget_exhausted = false) {
    if (elapsed < 0) throw std::invalid_argument("enabled_transitions: elapsed must be >= 0");
    std::vector<Transition> out;
    const long j2 = loc.epoch + elapsed;
    auto add = [&](Status to, Event ev) { out.push_back({{to, j2}, {ev, elapsed}}); };

    if (loc.status == Status::SafetyViolation) {
        for (std::size_t e = 0; e < kEventNames.size(); ++e)
            out.push_back({loc, {static_cast<Event>(e), elapsed}});
        return out;
    }
    switch (t.arch) {
        case ArchKind::Simplex:
            if (elapsed == 0 && loc.status == Status::Normal)
                add(Status::SafetyControllerDriven, Event::SafetyControllerActivated);
            if (elapsed == 0 && loc.status == Status::SafetyControllerDriven)
                add(Status::Normal, Event::SafetyControllerInactivated);
            break;
        case ArchKind::Redundant:
            if (loc.status == Status::Normal) add(Status::Corrupted, Event::AdversarialCyberDisruption);
            if (loc.status == Status::Corrupted && elapsed <= t.n1)
                add(Status::Restoration, Event::ControllerCrash);
            if (loc.status == Status::Restoration && elapsed <= t.n2)
                add(Status::Normal, Event::ControllerRestored);
            break;
        case ArchKind::RestartBased:
            if (loc.status == Status::Normal) add(Status::Corrupted, Event::AdversarialCyberDisruption);
            if (loc.status == Status::Normal && elapsed == t.n5) add(Status::RebootInit, Event::Timer);
            if (loc.status == Status::Corrupted && elapsed <= t.n3)
                add(Status::RebootInit, Event::ControllerCrash);
            if (loc.status == Status::Corrupted && elapsed <= t.n5) add(Status::RebootInit, Event::Timer);
            if (loc.status == Status::RebootInit && elapsed <= t.n4)
                add(Status::Normal, Event::InitializationDone);
            break;
    }
    if (budget_exhausted) add(Status::SafetyViolation, Event::MaximumTolerance);
    return out;
}

class ClockConstraintError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Fires a labeled transition. SafetyViolation is absorbing.
inline Location fire(const Location& loc, const TransitionLabel& label, const ArchitectureTiming& t,
                     bool budget_exhausted = false) {
    if (loc.status == Status::SafetyViolation) return loc;
    for (const auto& tr : enabled_transitions(loc, t, label.e2, budget_exhausted))
        if (tr.label.event == label.event) return tr.target;
    throw ClockConstraintError("transition '" + std::string(to_string(label.event)) + "' from (" +
                               std::string(to_string(loc.status)) + ", " + std::to_string(loc.epoch) +
                               ") with e2=" + std::to_string(label.e2) + " violates its clock constraint under " +
                               std::string(to_string(t.arch)) + " timing");
}

struct AttackSchedule {
    long cycle_length_epochs = 8;
    long corrupted_epochs = 0;  // realized crash delay; 0 samples uniformly from 1..N
    long first_attack_epoch = 0;

    bool operator==(const AttackSchedule&) const = default;

    void validate() const {
        if (cycle_length_epochs < 1) throw std::invalid_argument("attack: cycle length must be >= 1");
        if (corrupted_epochs < 0 || first_attack_epoch < 0)
            throw std::invalid_argument("attack: epochs must be non-negative");
    }

    bool is_onset(long epoch) const {
        return epoch >= first_attack_epoch && (epoch - first_attack_epoch) % cycle_length_epochs == 0;
    }

    /// Cycle length requirement A >= tau + N delta.
    bool satisfies_cycle_bound(double tau, long n_epochs, double delta) const {
        return cycle_length_epochs * delta >= tau + n_epochs * delta - 1e-12;
    }
};

struct TransitionRecord {
    Location from;
    Location to;
    TransitionLabel label;
};

struct CycleCost {
    long start_epoch = 0;
    long end_epoch = 0;     // exclusive
    bool attacked = false;  // false for the segment before the first onset
    double cost = 0.0;
    std::optional<double> first_excursion_time;
    std::optional<double> last_excursion_time;
};

struct CostReport {
    double max_cycle_cost = 0.0;
    std::optional<double> bound;  // J1 + J2 for the supplied certificate
    double budget = 0.0;
    bool violated = false;
    std::optional<long> violation_epoch;
    std::vector<long> excursion_epochs;
    std::vector<CycleCost> cycles;
};

struct Certificate {
    double c = 0.0;
    double d = 0.0;
    double tau = 0.0;
    bool operator==(const Certificate&) const = default;
};

struct RunSetup {
    ControlAffineSystem sys;
    SafetySpec spec;
    ControllerSpec policy = LinearPolicy{};
    std::optional<ControllerSpec> safety_controller;  // simplex only
    AdversaryMode adversary = BangBangWorst{};
    std::optional<AttackSchedule> schedule;
    ArchitectureTiming timing;
    long horizon_epochs = 150;
    int substeps = kDefaultSubsteps;
    std::uint64_t seed = 1;
    Vec x0;
    std::optional<Certificate> certificate;
};

struct RunResult {
    Trajectory trajectory;
    CostReport report;
    std::vector<TransitionRecord> log;
    std::vector<std::string> warnings;
    std::vector<std::pair<Status, long>> max_elapsed;  // per status, longest stay observed
};

/// Simulates the hybrid system for `horizon_epochs` epochs.
inline RunResult run(const RunSetup& setup) {
    const auto& sys = setup.sys;
    const auto& spec = setup.spec;
    const auto& timing = setup.timing;
    sys.validate();
    timing.validate();
    if (setup.x0.size() != sys.n) throw std::invalid_argument("run: x0 has wrong dimension");
    if (setup.substeps < 1) throw std::invalid_argument("run: substeps must be >= 1");
    if (setup.schedule) setup.schedule->validate();
    if (timing.arch == ArchKind::Simplex && !setup.safety_controller)
        throw std::invalid_argument("run: simplex architecture needs a safety controller");

    RunResult res;
    auto& traj = res.trajectory;
    auto& rep = res.report;
    rep.budget = spec.budget;
    if (setup.certificate) {
        const auto& c = *setup.certificate;
        const long n_epochs = std::max<long>(1, timing.worst_case_non_normal());
        rep.bound = worst_case_bound(spec, c.c, c.d, c.tau > 0 ? c.tau : 1.0, n_epochs, sys.delta);
    }

    Controller normal_ctrl(setup.policy);
    std::optional<Controller> safety_ctrl;
    if (setup.safety_controller) safety_ctrl.emplace(*setup.safety_controller);
    Adversary adversary(setup.adversary);
    std::mt19937_64 rng(setup.seed);

    Location loc{Status::Normal, 0};
    long elapsed = 0;
    std::array<long, kStatusNames.size()> longest{};
    Vec x = setup.x0;
    std::vector<Vec> epoch_states;  // state at the start of each epoch
    long crash_delay = 0;
    double j_cycle = 0.0;
    const double dt = sys.delta / setup.substeps;

    rep.cycles.push_back(CycleCost{0, 0, false, 0.0, {}, {}});
    auto fire_logged = [&](Event ev) {
        const TransitionLabel label{ev, elapsed};
        const Location to = fire(loc, label, timing, ev == Event::MaximumTolerance);
        res.log.push_back({loc, to, label});
        loc = to;
        elapsed = 0;
    };

    auto barrier = [&](const Vec& s) { return spec.h.eval(s); };
    double h_prev = barrier(x);
    bool first_sample = true;

    for (long e = 0; e < setup.horizon_epochs; ++e) {
        epoch_states.push_back(x);
        // Discrete transitions at the epoch boundary.
        if (loc.status != Status::SafetyViolation) {
            if (timing.arch == ArchKind::Simplex) {
                const double hv = barrier(x);
                if (loc.status == Status::Normal && hv < 0.0) fire_logged(Event::SafetyControllerActivated);
                else if (loc.status == Status::SafetyControllerDriven && hv >= 0.0)
                    fire_logged(Event::SafetyControllerInactivated);
            } else {
                for (int guard = 0; guard < 4; ++guard) {
                    const Status before = loc.status;
                    if (loc.status == Status::Corrupted && elapsed >= crash_delay) {
                        fire_logged(Event::ControllerCrash);
                    } else if (loc.status == Status::Restoration && elapsed >= timing.n2) {
                        fire_logged(Event::ControllerRestored);
                    } else if (loc.status == Status::RebootInit && elapsed >= timing.n4) {
                        fire_logged(Event::InitializationDone);
                    } else if (loc.status == Status::Normal && timing.arch == ArchKind::RestartBased &&
                               elapsed >= timing.n5) {
                        fire_logged(Event::Timer);
                    }
                    if (loc.status == before) break;
                }
                if (setup.schedule && setup.schedule->is_onset(e)) {
                    if (loc.status == Status::Normal) {
                        rep.cycles.back().end_epoch = e;
                        rep.cycles.back().cost = j_cycle;
                        rep.cycles.push_back(CycleCost{e, e, true, 0.0, {}, {}});
                        j_cycle = 0.0;
                        fire_logged(Event::AdversarialCyberDisruption);
                        const long cap = timing.arch == ArchKind::Redundant ? timing.n1
                                                                            : std::min(timing.n3, timing.n5);
                        if (setup.schedule->corrupted_epochs > 0) {
                            crash_delay = setup.schedule->corrupted_epochs;
                        } else {
                            std::uniform_int_distribution<long> pick(1, std::max<long>(1, cap));
                            crash_delay = pick(rng);
                        }
                        if (crash_delay > cap)
                            throw ClockConstraintError("attack: realized crash delay " + std::to_string(crash_delay) +
                                                       " exceeds architecture bound " + std::to_string(cap));
                    } else {
                        res.warnings.push_back("attack onset at epoch " + std::to_string(e) + " skipped: status " +
                                               std::string(to_string(loc.status)));
                    }
                }
            }
        }

        // Input selection by status.
        Vec u(sys.m, 0.0);
        switch (loc.status) {
            case Status::Normal: u = normal_ctrl.input(sys, spec.h, x); break;
            case Status::SafetyControllerDriven: u = safety_ctrl->input(sys, spec.h, x); break;
            case Status::Corrupted: u = saturate(adversary.input(sys, spec, x), sys.input_box); break;
            case Status::Restoration: {
                const long back = std::max<long>(0, e - timing.buffer_length);
                u = normal_ctrl.input(sys, spec.h, epoch_states[static_cast<std::size_t>(back)]);
                u = saturate(u, sys.input_box);
                break;
            }
            case Status::RebootInit:
            case Status::SafetyViolation: break;
        }

        if (first_sample) {
            traj.push(0.0, 0, x, u, loc, h_prev, 0.0, !sys.state_domain.contains(x));
            first_sample = false;
        }

        bool excursion_this_epoch = h_prev < 0.0;
        for (int s = 0; s < setup.substeps; ++s) {
            x = rk4_step(sys, x, u, dt);
            for (std::size_t i = 0; i < sys.n; ++i)
                if (std::abs(x[i]) > kDivergenceThreshold)
                    throw DivergenceError("run: state x" + std::to_string(i + 1) + " exceeded divergence threshold at epoch " +
                                          std::to_string(e));
            const double h_now = barrier(x);
            j_cycle += 0.5 * dt * (cost_of_barrier(spec, h_prev) + cost_of_barrier(spec, h_now));
            const double t = e * sys.delta + (s + 1) * dt;
            auto& cyc = rep.cycles.back();
            if (h_now < 0.0) {
                excursion_this_epoch = true;
                if (!cyc.first_excursion_time) cyc.first_excursion_time = t;
                cyc.last_excursion_time = t;
            }
            if (j_cycle > spec.budget && loc.status != Status::SafetyViolation) {
                fire_logged(Event::MaximumTolerance);
                rep.violated = true;
                rep.violation_epoch = e;
            }
            traj.push(t, e, x, u, loc, h_now, j_cycle, !sys.state_domain.contains(x));
            h_prev = h_now;
        }
        if (excursion_this_epoch) rep.excursion_epochs.push_back(e);

        if (timing.arch == ArchKind::Simplex && loc.status != Status::SafetyViolation) {
            loc.epoch += 1;  // implicit epoch tick; simplex switching is instantaneous
        } else {
            ++elapsed;
            auto& l = longest[static_cast<std::size_t>(loc.status)];
            l = std::max(l, elapsed);
        }
    }
    rep.cycles.back().end_epoch = setup.horizon_epochs;
    rep.cycles.back().cost = j_cycle;
    if (rep.cycles.front().end_epoch == 0 && rep.cycles.size() > 1) rep.cycles.erase(rep.cycles.begin());
    for (const auto& c : rep.cycles) rep.max_cycle_cost = std::max(rep.max_cycle_cost, c.cost);
    if (adversary.script_exhausted()) res.warnings.push_back("scripted adversary exhausted; held last value");
    if (safety_ctrl && safety_ctrl->qp_infeasible_count() > 0)
        res.warnings.push_back("safety QP infeasible on " + std::to_string(safety_ctrl->qp_infeasible_count()) +
                               " epochs; saturated fallback applied");
    for (std::size_t s = 0; s < longest.size(); ++s)
        if (longest[s] > 0) res.max_elapsed.emplace_back(static_cast<Status>(s), longest[s]);
    return res;
}

}  // namespace cra

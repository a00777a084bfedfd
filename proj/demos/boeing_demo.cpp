// Runs the three Boeing 747 lateral-dynamics presets under the bang-bang
// adversary and prints per-cycle cost against the budget.
//
//   boeing_demo            all presets
//   boeing_demo boeing-II  one preset

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "cra_safety.hpp"

namespace {

void show(const std::string& name) {
    const cra::RunConfig cfg = cra::preset(name);
    const auto res = cra::run(cfg.setup());
    const auto& rep = res.report;
    std::printf("%s (%s)\n", name.c_str(), std::string(cra::to_string(cfg.timing.arch)).c_str());
    std::printf("  max cycle cost %.4g, budget %.4g, %s\n", rep.max_cycle_cost, rep.budget,
                rep.violated ? "VIOLATED" : "ok");
    if (rep.bound) std::printf("  certificate bound %.4g\n", *rep.bound);
    int shown = 0;
    for (const auto& c : rep.cycles) {
        if (!c.attacked || shown++ >= 3) continue;
        std::printf("  cycle @%ld: J=%.4g", c.start_epoch, c.cost);
        if (c.first_excursion_time)
            std::printf(", outside C for t in [%.2f, %.2f]", *c.first_excursion_time, *c.last_excursion_time);
        std::printf("\n");
    }
    for (const auto& w : res.warnings) std::printf("  warning: %s\n", w.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    try {
        std::vector<std::string> names;
        for (int i = 1; i < argc; ++i) names.emplace_back(argv[i]);
        if (names.empty()) names = cra::preset_names();
        for (const auto& n : names) show(n);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "boeing_demo: %s\n", e.what());
        return 1;
    }
    return 0;
}

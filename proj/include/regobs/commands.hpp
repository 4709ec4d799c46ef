#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "regobs/report.hpp"
#include "regobs/scenario.hpp"

namespace regobs::cli {

struct CommandOptions {
    std::string out_dir;  // empty: no files written
    int resolution = 0;   // scan override
    std::optional<std::uint64_t> seed;
    unsigned workers = 0; // scan worker count; 0 = hardware
    std::ostream* human = nullptr; // defaults to std::cout
};

// Rank/strategic analysis under both bases; no simulation.
Json cmd_check(Scenario scenario, const CommandOptions& opts);

// Full estimator run: design, simulate, norm series, decay fits, verdicts.
// Writes trajectory.csv and norms.csv next to report.json.
Json cmd_simulate(Scenario scenario, const CommandOptions& opts);

// Built-in (or user-supplied) geometry where the same sensor fails the global
// test but passes the regional one; runs both estimator legs and reports the
// verdict pair, the global error floor and the regional reconstruction decay.
Json cmd_counterexample(std::optional<Scenario> scenario, const CommandOptions& opts);

// Margin/predicate sweep of a sensor template over the domain; writes scan.csv.
Json cmd_scan(Scenario scenario, const CommandOptions& opts);

// Builds the scenario's estimator and reports the three defining residuals
// with a pass/fail verdict at 1e-9.
Json cmd_verify(Scenario scenario, const CommandOptions& opts);

Scenario builtin_counterexample_scenario();

} // namespace regobs::cli

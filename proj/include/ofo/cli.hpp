#pragma once

#include "ofo/analysis.hpp"
#include "ofo/controller.hpp"
#include "ofo/io.hpp"
#include "ofo/plant.hpp"
#include "ofo/powergrid.hpp"
#include "ofo/sim.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ofo::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kNumericalFailure = 1, kUsage = 2 };

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

/// Reads the real process environment.
EnvLookup process_env();

/// Parsed run configuration.
///
/// JSON keys (top level): exactly one of "plant" (object with A,B,C,D,d or a
/// path to such a file) and "grid" (GridSpec object, a path, or {} for the
/// default network); optional "G" sets a uniform node conductance on the grid.
/// "gamma1", "gamma2", "y_ref" describe the quadratic objective ("y_ref"
/// defaults to the grid voltage reference, or zero for inline plants).
/// "mode", "eta" configure the controller ("eta" is required). "loop"
/// ("algebraic" | "lti"), "steps", "x0", "u0" (vector or "random"),
/// "decimation", "seed", "convention", "eta_grid" complete it.
///
/// Every scalar top-level key K can be overridden by the environment variable
/// OFO_<K upper-cased>, whose value is parsed as JSON and otherwise taken as a
/// string.
struct RunConfig {
    std::optional<io::Json> plant;  // resolved inline plant JSON
    std::optional<grid::GridSpec> grid;
    double gamma1 = 1.0;
    double gamma2 = 1.0;
    std::optional<Vector> y_ref;
    ControllerConfig controller;
    PlantKind loop = PlantKind::Algebraic;
    std::size_t steps = 100'000;
    std::optional<Vector> x0;
    std::optional<Vector> u0;
    bool random_u0 = false;
    std::size_t decimation = 1;
    std::uint64_t seed = 0;
    Convention convention = Convention::Tight;
    std::vector<double> eta_grid;
};

/// Throws ParseError naming the offending key.
RunConfig parse_config(io::Json config, const EnvLookup& env);

/// Everything a command needs once the plant source is resolved.
struct Problem {
    std::optional<LtiPlant> plant;
    SensitivityModel model;
    Vector d;
    SeparableObjective objective;
    std::optional<grid::GridSpec> grid;
    Vector state_offset;  ///< grid only; zero otherwise
};

Problem build_problem(const RunConfig& cfg);

/// Full certificate report. `convention` selects the checked constants; both
/// are always reported.
io::Json analysis_report(const Problem& problem, const RunConfig& cfg);

/// Runs the CLI. Arguments exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env);

}  // namespace ofo::cli

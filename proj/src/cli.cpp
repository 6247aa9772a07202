#include "ofo/cli.hpp"

#include "ofo/equilibria.hpp"
#include "ofo/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

namespace ofo::cli {

namespace fs = std::filesystem;
using io::Json;

EnvLookup process_env() {
    return [](std::string_view name) -> std::optional<std::string> {
        const char* v = std::getenv(std::string(name).c_str());
        if (v == nullptr) return std::nullopt;
        return std::string(v);
    };
}

namespace {

constexpr const char* kScalarKeys[] = {"eta",   "mode",       "gamma1",     "gamma2",
                                       "steps", "loop",       "decimation", "seed",
                                       "G",     "convention", "u0"};

std::string env_name(std::string_view key) {
    std::string name = "OFO_";
    for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return name;
}

void apply_env_overrides(Json& config, const EnvLookup& env) {
    for (const char* key : kScalarKeys) {
        const auto value = env(env_name(key));
        if (!value) continue;
        Json parsed = Json::parse(*value, nullptr, false);
        config[key] = parsed.is_discarded() ? Json(*value) : parsed;
    }
}

double number_key(const Json& config, const char* key) {
    const Json& v = config.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>()))
        throw ParseError(key, "expected a finite number");
    return v.get<double>();
}

std::size_t count_key(const Json& config, const char* key, std::size_t minimum) {
    const Json& v = config.at(key);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(minimum))
        throw ParseError(key, "expected an integer >= " + std::to_string(minimum));
    return static_cast<std::size_t>(v.get<long long>());
}

std::string string_key(const Json& config, const char* key) {
    const Json& v = config.at(key);
    if (!v.is_string()) throw ParseError(key, "expected a string");
    return v.get<std::string>();
}

Json resolve_reference(const Json& node, const char* key) {
    if (node.is_string()) return io::read_json_file(node.get<std::string>());
    if (!node.is_object()) throw ParseError(key, "expected an object or a file path");
    return node;
}

PlantKind parse_loop(const std::string& s) {
    if (s == "algebraic") return PlantKind::Algebraic;
    if (s == "lti") return PlantKind::Lti;
    throw ParseError("loop", "expected 'algebraic' or 'lti', got '" + s + "'");
}

}  // namespace

RunConfig parse_config(Json config, const EnvLookup& env) {
    if (!config.is_object()) throw ParseError("config", "expected a JSON object");
    apply_env_overrides(config, env);

    RunConfig cfg;
    const bool has_plant = config.contains("plant");
    const bool has_grid = config.contains("grid");
    if (has_plant == has_grid) throw ParseError("plant", "exactly one of 'plant' or 'grid' is required");
    if (has_plant) {
        cfg.plant = resolve_reference(config.at("plant"), "plant");
        (void)io::plant_from_json(*cfg.plant);  // validate early
    } else {
        cfg.grid = io::grid_from_json(resolve_reference(config.at("grid"), "grid"));
        if (config.contains("G")) {
            const double g = number_key(config, "G");
            if (!(g > 0.0)) throw ParseError("G", "must be positive");
            cfg.grid = grid::with_conductance(*cfg.grid, g);
        }
        cfg.gamma1 = cfg.grid->gamma1;
        cfg.gamma2 = cfg.grid->gamma2;
    }

    if (config.contains("gamma1")) cfg.gamma1 = number_key(config, "gamma1");
    if (config.contains("gamma2")) cfg.gamma2 = number_key(config, "gamma2");
    if (!(cfg.gamma1 > 0.0)) throw ParseError("gamma1", "must be positive");
    if (!(cfg.gamma2 > 0.0)) throw ParseError("gamma2", "must be positive");
    if (config.contains("y_ref")) cfg.y_ref = io::parse_vector(config.at("y_ref"), "y_ref");

    if (!config.contains("eta")) throw ParseError("eta", "missing required key");
    cfg.controller.eta = number_key(config, "eta");
    if (!(cfg.controller.eta > 0.0)) throw ParseError("eta", "must be positive");
    if (config.contains("mode")) cfg.controller.mode = parse_mode(string_key(config, "mode"));
    if (config.contains("loop")) cfg.loop = parse_loop(string_key(config, "loop"));
    if (config.contains("steps")) cfg.steps = count_key(config, "steps", 1);
    if (config.contains("decimation")) cfg.decimation = count_key(config, "decimation", 1);
    if (config.contains("seed")) cfg.seed = count_key(config, "seed", 0);
    if (config.contains("convention"))
        cfg.convention = parse_convention(string_key(config, "convention"));
    if (config.contains("x0")) cfg.x0 = io::parse_vector(config.at("x0"), "x0");
    if (config.contains("u0")) {
        const Json& u0 = config.at("u0");
        if (u0.is_string()) {
            if (u0.get<std::string>() != "random")
                throw ParseError("u0", "expected a vector or \"random\"");
            cfg.random_u0 = true;
        } else {
            cfg.u0 = io::parse_vector(u0, "u0");
        }
    }
    if (config.contains("eta_grid")) {
        const Vector g = io::parse_vector(config.at("eta_grid"), "eta_grid");
        cfg.eta_grid.assign(g.data(), g.data() + g.size());
        if (std::any_of(cfg.eta_grid.begin(), cfg.eta_grid.end(), [](double e) { return !(e > 0.0); }))
            throw ParseError("eta_grid", "step sizes must be positive");
    }
    return cfg;
}

Problem build_problem(const RunConfig& cfg) {
    if (cfg.grid) {
        grid::GridModel gm = grid::assemble_plant(*cfg.grid);
        Vector y_ref = cfg.y_ref ? *cfg.y_ref : gm.y_ref;
        require_size(y_ref, gm.model.n_agents(), "y_ref");
        SeparableObjective obj = make_quadratic_objective(cfg.gamma1, cfg.gamma2, y_ref);
        return Problem{std::move(gm.plant), std::move(gm.model), std::move(gm.disturbance),
                       std::move(obj), cfg.grid, std::move(gm.state_offset)};
    }
    LtiPlant plant = io::plant_from_json(*cfg.plant);
    SensitivityModel model = compute_sensitivity(plant);
    const Eigen::Index n = plant.n_agents();
    Vector y_ref = cfg.y_ref ? *cfg.y_ref : Vector::Zero(n);
    if (y_ref.size() != n) throw ParseError("y_ref", "expected length " + std::to_string(n));
    SeparableObjective obj = make_quadratic_objective(cfg.gamma1, cfg.gamma2, y_ref);
    Vector d = plant.d();
    Vector offset = Vector::Zero(plant.n_states());
    return Problem{std::move(plant), std::move(model), std::move(d), std::move(obj), std::nullopt,
                   std::move(offset)};
}

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json constants_json(const MonotonicityConstants& k) {
    return Json{{"m", k.m},
                {"c", k.c},
                {"L", k.L},
                {"sigma_max_H", k.sigma_max_H},
                {"sigma_min_H", k.sigma_min_H},
                {"sigma_max_offdiag", k.sigma_max_offdiag}};
}

Json rate_json(const MonotonicityConstants& k, double eta) {
    try {
        const ContractionRate r = contraction_rate(k, eta);
        return Json{{"rho", r.rho},
                    {"admissible", r.admissible},
                    {"eta_upper", number_or_null(r.eta_upper)},
                    {"eta_rho_below_one", r.eta_rho_below_one},
                    {"degenerate", r.degenerate}};
    } catch (const CouplingTooStrong& e) {
        return Json{{"error", e.what()}, {"admissible", false}};
    }
}

Json lti_json(const LtiPlant& plant, const Problem& p, double eta, Convention conv) {
    Json out = Json::object();
    try {
        const LtiRateCertificate cert = xi_matrix(plant, p.objective, p.model, eta, conv);
        out["xi"] = Json::array({Json::array({cert.xi(0, 0), cert.xi(0, 1)}),
                                 Json::array({cert.xi(1, 0), cert.xi(1, 1)})});
        out["lambda_max"] = cert.lambda_max;
        out["m_prime"] = cert.m_prime;
        out["L_prime"] = cert.L_prime;
        out["a1"] = cert.a1;
        out["a2"] = cert.a2;
        out["a3"] = cert.a3;
        out["a4"] = cert.a4;
        out["t"] = cert.t;
        out["branch"] = std::string(to_string(cert.branch()));
    } catch (const Error& e) {
        out["error"] = e.what();
        return out;
    }
    try {
        const StepSizeCertificate es = eta_star(plant, p.objective, p.model, conv);
        out["eta_star"] = number_or_null(es.eta_star);
        out["eta_star_capped"] = es.capped;
    } catch (const NotCertifiable& e) {
        out["eta_star"] = nullptr;
        out["eta_star_error"] = e.what();
    }
    return out;
}

}  // namespace

Json analysis_report(const Problem& p, const RunConfig& cfg) {
    const double eta = cfg.controller.eta;
    const auto tight = monotonicity_constants(p.objective, p.model, Convention::Tight);
    const auto paper = monotonicity_constants(p.objective, p.model, Convention::Paper);
    const CouplingCondition cc = coupling_condition(p.objective, p.model);

    Json report;
    report["schema"] = "ofo.analysis/1";
    report["n_agents"] = p.model.n_agents();
    report["source"] = p.grid ? "grid" : "plant";
    report["eta"] = eta;
    report["checked_convention"] = std::string(to_string(cfg.convention));
    report["coupling_condition"] = {{"satisfied", cc.satisfied}, {"lhs", cc.lhs}, {"rhs", cc.rhs}};
    report["constants"] = {{"tight", constants_json(tight)}, {"paper", constants_json(paper)}};
    report["rate"] = {{"tight", rate_json(tight, eta)}, {"paper", rate_json(paper, eta)}};

    std::vector<double> grid = cfg.eta_grid;
    if (grid.empty()) grid = {eta};
    Json table = Json::array();
    for (double e : grid)
        table.push_back({{"eta", e}, {"tight", rate_json(tight, e)}, {"paper", rate_json(paper, e)}});
    report["rho_table"] = table;

    try {
        const auto opt = global_optimum(p.objective, p.model, p.d);
        const auto fp = decentralized_fixed_point(p.objective, p.model, p.d);
        const auto tb = suboptimality_bound(p.objective, p.model, p.d, fp.u, tight);
        const auto pb = suboptimality_bound(p.objective, p.model, p.d, fp.u, paper);
        report["equilibria"] = {{"u_star", io::to_json(opt.u)},
                                {"u_inf", io::to_json(fp.u)},
                                {"distance", (opt.u - fp.u).norm()},
                                {"u_star_residual", opt.residual},
                                {"nash_residual", fp.residual},
                                {"uniqueness_certified", fp.uniqueness_certified}};
        report["bound"] = {
            {"tight", {{"bound", number_or_null(tb.bound)}, {"applicable", tb.applicable}}},
            {"paper", {{"bound", number_or_null(pb.bound)}, {"applicable", pb.applicable}}}};
    } catch (const Error& e) {
        report["equilibria"] = {{"error", e.what()}};
        report["bound"] = {{"error", e.what()}};
    }

    if (p.plant) {
        report["lti"] = {{"tight", lti_json(*p.plant, p, eta, Convention::Tight)},
                         {"paper", lti_json(*p.plant, p, eta, Convention::Paper)}};
    } else {
        report["lti"] = nullptr;
    }
    return report;
}

namespace {

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string convention;
    bool parallel = false;
};

Json load_config_json(const GlobalFlags& flags) {
    if (flags.config_path.empty()) throw ParseError("--config", "a config file is required");
    return io::read_json_file(flags.config_path);
}

RunConfig load_run_config(const GlobalFlags& flags, const EnvLookup& env) {
    Json raw = load_config_json(flags);
    RunConfig cfg = parse_config(std::move(raw), env);
    if (flags.seed) cfg.seed = *flags.seed;
    if (!flags.convention.empty()) cfg.convention = parse_convention(flags.convention);
    return cfg;
}

std::string out_path(const GlobalFlags& flags, const std::string& name) {
    const fs::path dir = flags.out_dir.empty() ? fs::path(".") : fs::path(flags.out_dir);
    fs::create_directories(dir);
    return (dir / name).string();
}

Vector initial_input(const RunConfig& cfg, Eigen::Index n) {
    if (cfg.u0) {
        if (cfg.u0->size() != n) throw ParseError("u0", "expected length " + std::to_string(n));
        return *cfg.u0;
    }
    if (cfg.random_u0) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Vector u(n);
        for (Eigen::Index i = 0; i < n; ++i) u(i) = dist(rng);
        return u;
    }
    return Vector::Zero(n);
}

struct RunOutcome {
    Trajectory trajectory;
    std::optional<std::size_t> diverged_at;
};

RunOutcome run_loop(const Problem& p, const RunConfig& cfg, PlantKind loop, Mode mode) {
    const Eigen::Index n = p.model.n_agents();
    const Vector u0 = initial_input(cfg, n);
    ControllerConfig ctrl = cfg.controller;
    ctrl.mode = mode;
    const RunOptions opts{cfg.steps, 1e-12};
    RunOutcome outcome;
    try {
        if (loop == PlantKind::Algebraic) {
            outcome.trajectory = run_algebraic(p.model, p.objective, p.d, ctrl, u0, opts);
        } else {
            if (!p.plant) throw ParseError("loop", "the LTI loop needs a state-space plant");
            Vector x0 = Vector::Zero(p.plant->n_states());
            if (cfg.x0) {
                if (cfg.x0->size() != x0.size())
                    throw ParseError("x0", "expected length " + std::to_string(x0.size()));
                // x0 is given in physical coordinates; the plant runs in deviations
                x0 = *cfg.x0 - p.state_offset;
            }
            outcome.trajectory = run_lti(*p.plant, p.objective, ctrl, x0, u0, opts);
        }
    } catch (const NonFinite& e) {
        outcome.trajectory = e.partial();
        outcome.diverged_at = e.step();
    }
    outcome.trajectory.info.seed = cfg.seed;
    return outcome;
}

struct References {
    EquilibriumSolution optimum;
    EquilibriumSolution fixed_point;
};

References references(const Problem& p) {
    return {global_optimum(p.objective, p.model, p.d),
            decentralized_fixed_point(p.objective, p.model, p.d)};
}

/// CSV text and summary JSON for one run. rel_err_u is measured against u*,
/// combined_sq against the run's own limit (u_inf for decentralized runs).
std::pair<std::string, Json> render_run(const Problem& p, const RunConfig& cfg,
                                        const RunOutcome& run, const References& refs) {
    const Trajectory& traj = run.trajectory;
    const Vector& limit = traj.info.mode == Mode::Decentralized ? refs.fixed_point.u : refs.optimum.u;
    const ErrorMetrics rel = metrics(traj, refs.optimum.u, p.model);
    const ErrorMetrics combined = metrics(traj, limit, p.model);
    std::string csv = io::trajectory_csv(traj, rel, &combined, cfg.decimation);

    const Vector& last = traj.u.back();
    const double inf_scale = refs.fixed_point.u.norm();
    Json summary;
    summary["mode"] = std::string(to_string(traj.info.mode));
    summary["loop"] = std::string(to_string(traj.info.plant));
    summary["eta"] = traj.info.eta;
    summary["seed"] = traj.info.seed;
    summary["steps_requested"] = cfg.steps;
    summary["iterations"] = traj.info.iterations;
    summary["converged"] = traj.info.converged;
    summary["diverged"] = run.diverged_at.has_value();
    summary["diverged_at"] = run.diverged_at ? Json(*run.diverged_at) : Json(nullptr);
    summary["final_u"] = io::to_json(last);
    summary["final_rel_err_u_star"] = number_or_null(rel.rel_err_u.back());
    summary["final_rel_err_u_inf"] =
        number_or_null(inf_scale > 0.0 ? (last - refs.fixed_point.u).norm() / inf_scale
                                       : (last - refs.fixed_point.u).norm());
    summary["u_star"] = io::to_json(refs.optimum.u);
    summary["u_inf"] = io::to_json(refs.fixed_point.u);
    if (traj.info.mode == Mode::Decentralized) {
        const auto tight = monotonicity_constants(p.objective, p.model, Convention::Tight);
        const auto paper = monotonicity_constants(p.objective, p.model, Convention::Paper);
        const auto tb = suboptimality_bound(p.objective, p.model, p.d, refs.fixed_point.u, tight);
        const auto pb = suboptimality_bound(p.objective, p.model, p.d, refs.fixed_point.u, paper);
        summary["suboptimality"] = {
            {"realized_distance", (refs.optimum.u - refs.fixed_point.u).norm()},
            {"tight_bound", number_or_null(tb.bound)},
            {"tight_applicable", tb.applicable},
            {"paper_bound", number_or_null(pb.bound)},
            {"paper_applicable", pb.applicable}};
    }
    return {std::move(csv), std::move(summary)};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int cmd_analyze(const GlobalFlags& flags, const std::vector<double>& eta_grid, std::ostream& out,
                const EnvLookup& env) {
    RunConfig cfg = load_run_config(flags, env);
    if (!eta_grid.empty()) cfg.eta_grid = eta_grid;
    const Problem p = build_problem(cfg);
    const Json report = analysis_report(p, cfg);
    const std::string text = dump(report);
    out << text;
    if (!flags.out_dir.empty()) io::write_text_file(out_path(flags, "analysis.json"), text);

    const Json& rate = report["rate"][std::string(to_string(cfg.convention))];
    const bool ok = report["coupling_condition"]["satisfied"].get<bool>() && rate["admissible"].get<bool>();
    return ok ? kOk : kNumericalFailure;
}

int simulate_and_write(const GlobalFlags& flags, const RunConfig& cfg, std::ostream& out) {
    const Problem p = build_problem(cfg);
    const References refs = references(p);
    const RunOutcome run = run_loop(p, cfg, cfg.loop, cfg.controller.mode);
    auto [csv, summary] = render_run(p, cfg, run, refs);
    summary["schema"] = "ofo.simulate/1";
    io::write_text_file(out_path(flags, "trajectory.csv"), csv);
    const std::string text = dump(summary);
    io::write_text_file(out_path(flags, "metrics.json"), text);
    out << text;
    return run.diverged_at ? kNumericalFailure : kOk;
}

int cmd_simulate(const GlobalFlags& flags, std::ostream& out, const EnvLookup& env) {
    return simulate_and_write(flags, load_run_config(flags, env), out);
}

Json grid_manifest_params(const grid::GridSpec& spec) { return io::grid_to_json(spec); }

int figure3(const GlobalFlags& flags, std::size_t steps, std::ostream& out) {
    RunConfig cfg;
    cfg.grid = grid::with_conductance(grid::default_topology(), 1.0);
    cfg.controller.eta = 0.05;
    cfg.steps = steps;
    cfg.seed = flags.seed.value_or(0);
    const Problem p = build_problem(cfg);
    const References refs = references(p);

    Json manifest;
    manifest["schema"] = "ofo.figures/1";
    manifest["preset"] = "fig3";
    manifest["G"] = 1.0;
    manifest["eta"] = cfg.controller.eta;
    manifest["steps"] = steps;
    manifest["seed"] = cfg.seed;
    manifest["grid"] = grid_manifest_params(*cfg.grid);
    manifest["runs"] = Json::array();
    bool failed = false;
    for (Mode mode : {Mode::Centralized, Mode::Decentralized}) {
        for (PlantKind loop : {PlantKind::Algebraic, PlantKind::Lti}) {
            const RunOutcome run = run_loop(p, cfg, loop, mode);
            auto [csv, summary] = render_run(p, cfg, run, refs);
            const std::string file = "fig3_" + std::string(to_string(mode)) + "_" +
                                     std::string(to_string(loop)) + ".csv";
            io::write_text_file(out_path(flags, file), csv);
            summary["file"] = file;
            summary["G"] = 1.0;
            manifest["runs"].push_back(summary);
            failed = failed || run.diverged_at.has_value();
        }
    }
    manifest["files"] = Json::array();
    for (const auto& r : manifest["runs"]) manifest["files"].push_back(r["file"]);
    const std::string text = dump(manifest);
    io::write_text_file(out_path(flags, "manifest.json"), text);
    out << text;
    return failed ? kNumericalFailure : kOk;
}

int figure4(const GlobalFlags& flags, const std::vector<double>& g_values, double eta,
            std::size_t steps, std::ostream& out) {
    const grid::GridSpec base = grid::default_topology();
    const auto rows = grid::sweep_g(base, g_values, eta, steps, flags.parallel);
    io::write_text_file(out_path(flags, "fig4_sweep.csv"), grid::sweep_csv(rows));

    Json manifest;
    manifest["schema"] = "ofo.figures/1";
    manifest["preset"] = "fig4";
    manifest["eta"] = eta;
    manifest["steps"] = steps;
    manifest["seed"] = flags.seed.value_or(0);
    manifest["g_values"] = g_values;
    manifest["grid"] = grid_manifest_params(base);
    manifest["files"] = Json::array({"fig4_sweep.csv"});
    const std::string text = dump(manifest);
    io::write_text_file(out_path(flags, "manifest.json"), text);
    out << text;
    return kOk;
}

grid::GridSpec grid_base(const GlobalFlags& flags) {
    if (flags.config_path.empty()) return grid::default_topology();
    const Json raw = io::read_json_file(flags.config_path);
    if (raw.contains("grid")) return io::grid_from_json(resolve_reference(raw.at("grid"), "grid"));
    return io::grid_from_json(raw);
}

int cmd_grid_build(const GlobalFlags& flags, std::optional<double> g, std::ostream& out) {
    grid::GridSpec spec = grid_base(flags);
    if (g) spec = grid::with_conductance(spec, *g);
    const grid::GridModel gm = grid::assemble_plant(spec);
    Json doc;
    doc["schema"] = "ofo.grid/1";
    doc["spec"] = io::grid_to_json(spec);
    doc["plant"] = io::plant_to_json(gm.plant);
    doc["H"] = io::to_json(gm.model.H);
    doc["y_ref"] = io::to_json(gm.y_ref);
    doc["spectral_radius"] = gm.plant.spectral_radius();
    const std::string text = dump(doc);
    io::write_text_file(out_path(flags, "grid.json"), text);
    out << text;
    return kOk;
}

std::vector<double> parse_list(const std::string& text, const char* key) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size() || !(v > 0.0)) throw std::invalid_argument(item);
            values.push_back(v);
        } catch (const std::exception&) {
            throw ParseError(key, "expected a comma-separated list of positive numbers");
        }
    }
    if (values.empty()) throw ParseError(key, "list is empty");
    return values;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env) {
    CLI::App app{"Online feedback optimization: closed-loop simulation and certificates", "ofo"};
    app.require_subcommand(1);
    GlobalFlags flags;
    std::uint64_t seed = 0;
    app.add_option("--config", flags.config_path, "JSON run configuration");
    app.add_option("--out", flags.out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
    app.add_option("--convention", flags.convention, "constants checked for exit codes")
        ->check(CLI::IsMember({"paper", "tight"}));
    app.add_flag("--parallel", flags.parallel, "run sweep rows concurrently");

    std::string eta_grid_text;
    auto* analyze = app.add_subcommand("analyze", "emit all certificates as JSON");
    analyze->add_option("--eta-grid", eta_grid_text, "comma-separated step sizes for the rho table");

    auto* simulate = app.add_subcommand("simulate", "run the configured closed loop");

    std::string preset;
    std::size_t fig_steps = 100'000;
    std::string fig_g = "1,2,5,10,20,50,100";
    double fig_eta = 0.05;
    auto* figures = app.add_subcommand("figures", "reproduce the case-study figure data");
    figures->add_option("preset", preset, "fig3 or fig4")->required()->check(CLI::IsMember({"fig3", "fig4"}));
    figures->add_option("--steps", fig_steps, "max controller steps per run");
    figures->add_option("--g", fig_g, "conductance values for fig4");
    figures->add_option("--eta", fig_eta, "controller step for fig4");

    auto* grid_cmd = app.add_subcommand("grid", "DC grid case study");
    grid_cmd->require_subcommand(1);
    std::optional<double> build_g;
    auto* grid_build = grid_cmd->add_subcommand("build", "assemble the discretized grid plant");
    grid_build->add_option("--G", build_g, "uniform node conductance");

    std::optional<double> sim_g;
    double sim_eta = 0.05;
    std::string sim_mode = "decentralized";
    std::string sim_loop = "algebraic";
    std::size_t sim_steps = 100'000;
    auto* grid_sim = grid_cmd->add_subcommand("simulate", "simulate the grid loop");
    grid_sim->add_option("--G", sim_g, "uniform node conductance");
    grid_sim->add_option("--eta", sim_eta, "controller step size");
    grid_sim->add_option("--mode", sim_mode)->check(CLI::IsMember({"centralized", "decentralized"}));
    grid_sim->add_option("--loop", sim_loop)->check(CLI::IsMember({"algebraic", "lti"}));
    grid_sim->add_option("--steps", sim_steps);

    std::string sweep_g = "1,2,5,10,20,50,100";
    double sweep_eta = 0.05;
    std::size_t sweep_steps = 100'000;
    auto* grid_sweep = grid_cmd->add_subcommand("sweep", "sweep the node conductance");
    grid_sweep->add_option("--g", sweep_g, "comma-separated conductance values");
    grid_sweep->add_option("--eta", sweep_eta, "controller step size");
    grid_sweep->add_option("--steps", sweep_steps);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    if (seed_opt->count() > 0) flags.seed = seed;

    try {
        if (*analyze) {
            std::vector<double> grid_values;
            if (!eta_grid_text.empty()) grid_values = parse_list(eta_grid_text, "--eta-grid");
            return cmd_analyze(flags, grid_values, out, env);
        }
        if (*simulate) return cmd_simulate(flags, out, env);
        if (*figures) {
            if (preset == "fig3") return figure3(flags, fig_steps, out);
            return figure4(flags, parse_list(fig_g, "--g"), fig_eta, fig_steps, out);
        }
        if (*grid_build) return cmd_grid_build(flags, build_g, out);
        if (*grid_sim) {
            RunConfig cfg;
            cfg.grid = grid_base(flags);
            if (sim_g) cfg.grid = grid::with_conductance(*cfg.grid, *sim_g);
            cfg.gamma1 = cfg.grid->gamma1;
            cfg.gamma2 = cfg.grid->gamma2;
            cfg.controller = {parse_mode(sim_mode), sim_eta};
            cfg.controller.validate();
            cfg.loop = sim_loop == "lti" ? PlantKind::Lti : PlantKind::Algebraic;
            cfg.steps = sim_steps;
            cfg.seed = flags.seed.value_or(0);
            return simulate_and_write(flags, cfg, out);
        }
        if (*grid_sweep) {
            const auto rows = grid::sweep_g(grid_base(flags), parse_list(sweep_g, "--g"), sweep_eta,
                                            sweep_steps, flags.parallel);
            const std::string csv = grid::sweep_csv(rows);
            io::write_text_file(out_path(flags, "sweep.csv"), csv);
            out << csv;
            return kOk;
        }
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalFailure;
    }
    return kUsage;
}

}  // namespace ofo::cli

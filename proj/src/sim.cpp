#include "ofo/sim.hpp"

#include <string>

namespace ofo {

std::string_view to_string(PlantKind kind) {
    return kind == PlantKind::Algebraic ? "algebraic" : "lti";
}

NonFinite::NonFinite(std::size_t step, Trajectory partial)
    : Error("iterate became non-finite at step " + std::to_string(step)),
      step_(step),
      partial_(std::move(partial)) {}

Trajectory run_algebraic(const SensitivityModel& model, const SeparableObjective& obj,
                         const Vector& d, const ControllerConfig& cfg, const Vector& u0,
                         const RunOptions& options) {
    cfg.validate();
    if (options.steps < 1) throw Error("steps must be at least 1");
    require_size(u0, model.n_agents(), "u0");

    Trajectory traj;
    traj.info.mode = cfg.mode;
    traj.info.eta = cfg.eta;
    traj.info.plant = PlantKind::Algebraic;

    Vector u = u0;
    Vector y = steady_state_output(model, u, d);
    traj.u.push_back(u);
    traj.y.push_back(y);
    for (std::size_t k = 0; k < options.steps; ++k) {
        Vector next = controller_step(cfg, obj, model, u, y);
        if (!next.allFinite()) {
            traj.info.iterations = k;
            throw NonFinite(k + 1, std::move(traj));
        }
        const double change = (next - u).norm();
        u = std::move(next);
        y = steady_state_output(model, u, d);
        if (!y.allFinite()) {
            traj.info.iterations = k;
            throw NonFinite(k + 1, std::move(traj));
        }
        traj.u.push_back(u);
        traj.y.push_back(y);
        traj.info.iterations = k + 1;
        if (change < options.stop_tolerance) {
            traj.info.converged = true;
            break;
        }
    }
    return traj;
}

Trajectory run_lti(const LtiPlant& plant, const SeparableObjective& obj,
                   const ControllerConfig& cfg, const Vector& x0, const Vector& u0,
                   const RunOptions& options) {
    cfg.validate();
    if (options.steps < 1) throw Error("steps must be at least 1");
    require_size(x0, plant.n_states(), "x0");
    require_size(u0, plant.n_agents(), "u0");
    const SensitivityModel model = compute_sensitivity(plant);

    Trajectory traj;
    traj.info.mode = cfg.mode;
    traj.info.eta = cfg.eta;
    traj.info.plant = PlantKind::Lti;

    Vector x = x0;
    Vector u = u0;
    for (std::size_t k = 0;; ++k) {
        PlantStep s = step(plant, x, u);
        if (!s.y.allFinite()) {
            traj.info.iterations = k == 0 ? 0 : k - 1;
            throw NonFinite(k, std::move(traj));
        }
        traj.x.push_back(x);
        traj.u.push_back(u);
        traj.y.push_back(s.y);
        traj.info.iterations = k;
        if (k == options.steps) break;

        Vector next_u = controller_step(cfg, obj, model, u, s.y);
        if (!next_u.allFinite() || !s.x_next.allFinite()) throw NonFinite(k + 1, std::move(traj));
        const double du = (next_u - u).norm();
        const double dx = (s.x_next - x).norm();
        u = std::move(next_u);
        x = std::move(s.x_next);
        if (du < options.stop_tolerance && dx < options.stop_tolerance) {
            // record the final sample before stopping
            const PlantStep last = step(plant, x, u);
            traj.x.push_back(x);
            traj.u.push_back(u);
            traj.y.push_back(last.y);
            traj.info.iterations = k + 1;
            traj.info.converged = true;
            break;
        }
    }
    return traj;
}

ErrorMetrics metrics(const Trajectory& trajectory, const Vector& u_ref,
                     const SensitivityModel& model) {
    ErrorMetrics out;
    const double scale = u_ref.stableNorm();
    out.absolute = scale == 0.0;
    out.rel_err_u.reserve(trajectory.size());
    for (const Vector& u : trajectory.u) {
        require_size(u, u_ref.size(), "u_ref");
        const double err = (u - u_ref).stableNorm();
        out.rel_err_u.push_back(out.absolute ? err : err / scale);
    }
    if (!trajectory.x.empty() && model.has_state_map()) {
        std::vector<double> combined;
        combined.reserve(trajectory.size());
        for (std::size_t k = 0; k < trajectory.size(); ++k)
            combined.push_back((trajectory.x[k] - model.H_x * trajectory.u[k]).squaredNorm() +
                               (trajectory.u[k] - u_ref).squaredNorm());
        out.combined_sq = std::move(combined);
    }
    return out;
}

}  // namespace ofo

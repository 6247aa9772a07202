#include "ofo/equilibria.hpp"

#include "ofo/analysis.hpp"
#include "ofo/errors.hpp"

#include <cmath>
#include <string>

namespace ofo {

namespace {

void check_inputs(const SeparableObjective& obj, const SensitivityModel& model, const Vector& d) {
    if (obj.size() != model.n_agents())
        throw DimensionMismatch("objective and sensitivity model disagree on agent count");
    require_size(d, model.n_agents(), "d");
}

Vector start_point(const SolverOptions& options, Eigen::Index n) {
    if (!options.initial) return Vector::Zero(n);
    require_size(*options.initial, n, "initial point");
    return *options.initial;
}

template <class Map>
Vector forward_iterate(Map&& map, Vector u, double step, const SolverOptions& options,
                       std::size_t& iterations, double& residual) {
    for (iterations = 0; iterations < options.max_iterations; ++iterations) {
        const Vector g = map(u);
        residual = g.norm();
        if (!std::isfinite(residual)) break;
        if (residual <= options.tolerance) return u;
        u -= step * g;
    }
    residual = map(u).norm();
    if (residual <= options.tolerance) return u;
    throw NoConvergence(iterations, residual);
}

}  // namespace

EquilibriumSolution global_optimum(const SeparableObjective& obj, const SensitivityModel& model,
                                   const Vector& d, const SolverOptions& options) {
    check_inputs(obj, model, d);
    const Eigen::Index n = model.n_agents();
    const auto grad = [&](const Vector& u) { return reduced_gradient(obj, model, d, u); };

    EquilibriumSolution sol;
    sol.kind = EquilibriumKind::GlobalOptimum;
    if (const auto& q = obj.quadratic(); q && !options.iterative) {
        const Matrix lhs = q->gamma1 * Matrix::Identity(n, n) + q->gamma2 * model.H.transpose() * model.H;
        const Vector rhs = q->gamma2 * model.H.transpose() * (q->y_ref - d);
        sol.u = lhs.ldlt().solve(rhs);
    } else {
        const auto k = monotonicity_constants(obj, model, Convention::Tight);
        sol.u = forward_iterate(grad, start_point(options, n), 1.0 / k.L, options, sol.iterations,
                                sol.residual);
    }
    sol.residual = grad(sol.u).norm();
    sol.y = steady_state_output(model, sol.u, d);
    return sol;
}

EquilibriumSolution decentralized_fixed_point(const SeparableObjective& obj,
                                              const SensitivityModel& model, const Vector& d,
                                              const SolverOptions& options) {
    check_inputs(obj, model, d);
    const Eigen::Index n = model.n_agents();
    const auto field = [&](const Vector& u) { return pseudo_gradient(obj, model, d, u); };

    EquilibriumSolution sol;
    sol.kind = EquilibriumKind::DecentralizedFixedPoint;
    sol.uniqueness_certified = coupling_condition(obj, model).satisfied;
    if (const auto& q = obj.quadratic(); q && !options.iterative) {
        const Matrix lhs = q->gamma1 * Matrix::Identity(n, n) + q->gamma2 * model.H_diag * model.H;
        const Vector rhs = q->gamma2 * model.H_diag * (q->y_ref - d);
        Eigen::FullPivLU<Matrix> lu(lhs);
        if (!lu.isInvertible()) throw SingularMatrix("decentralized stationarity system is singular");
        sol.u = lu.solve(rhs);
    } else {
        // Forward step mu/L_F^2 contracts whenever the field is mu-strongly monotone.
        const auto& b = obj.bounds();
        const auto k = monotonicity_constants(obj, model, Convention::Tight);
        const double lipschitz = b.L_u + b.L_y * sigma_max(model.H_diag) * k.sigma_max_H;
        const double mu = k.m - k.c;
        const double step = mu > 0.0 ? mu / (lipschitz * lipschitz) : 1.0 / lipschitz;
        sol.u = forward_iterate(field, start_point(options, n), step, options, sol.iterations,
                                sol.residual);
    }
    sol.residual = field(sol.u).norm();
    sol.y = steady_state_output(model, sol.u, d);
    return sol;
}

double nash_residual(const SeparableObjective& obj, const SensitivityModel& model,
                     const Vector& d, const Vector& u) {
    check_inputs(obj, model, d);
    return pseudo_gradient(obj, model, d, u).norm();
}

double agent_cost(const SeparableObjective& obj, const SensitivityModel& model, const Vector& d,
                  const Vector& u, Eigen::Index i) {
    const double y_i = model.H.row(i).dot(u) + d(i);
    return obj.input_cost(i).value(u(i)) + obj.output_cost(i).value(y_i);
}

bool best_response_check(const SeparableObjective& obj, const SensitivityModel& model,
                         const Vector& d, const Vector& u, Eigen::Index i, double radius,
                         int points, double slack) {
    check_inputs(obj, model, d);
    require_size(u, model.n_agents(), "u");
    if (i < 0 || i >= model.n_agents()) throw DimensionMismatch("agent index out of range");
    const double base = agent_cost(obj, model, d, u, i);
    Vector deviated = u;
    for (int p = 0; p < points; ++p) {
        const double delta =
            points == 1 ? 0.0 : -radius + 2.0 * radius * static_cast<double>(p) / (points - 1);
        deviated(i) = u(i) + delta;
        if (agent_cost(obj, model, d, deviated, i) < base - slack) return false;
    }
    return true;
}

}  // namespace ofo

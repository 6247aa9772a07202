#pragma once

#include "ofo/linalg.hpp"
#include "ofo/objective.hpp"
#include "ofo/plant.hpp"

#include <cstddef>
#include <optional>

namespace ofo {

enum class EquilibriumKind { GlobalOptimum, DecentralizedFixedPoint };

struct EquilibriumSolution {
    Vector u;
    Vector y;               ///< H u + d
    double residual = 0.0;  ///< norm of the stationarity map at u
    EquilibriumKind kind = EquilibriumKind::GlobalOptimum;
    /// False when the coupling condition fails: the point was found but
    /// uniqueness is not guaranteed.
    bool uniqueness_certified = true;
    std::size_t iterations = 0;  ///< 0 for closed-form solves
};

struct SolverOptions {
    double tolerance = 1e-10;
    std::size_t max_iterations = 1'000'000;
    /// Starting point for iterative solves; zero when unset.
    std::optional<Vector> initial;
    /// Force the iterative path even for quadratic objectives.
    bool iterative = false;
};

/// Minimizer of Phi(u, H u + d). Quadratic objectives are solved from
/// (gamma1 I + gamma2 H^T H) u = gamma2 H^T (y_ref - d); others by gradient
/// descent with step 1/L. Throws NoConvergence.
EquilibriumSolution global_optimum(const SeparableObjective& obj, const SensitivityModel& model,
                                   const Vector& d, const SolverOptions& options = {});

/// Zero of the pseudo-gradient, i.e. the stationary point of the decentralized
/// controller. Quadratic: (gamma1 I + gamma2 H_diag H) u = gamma2 H_diag (y_ref - d);
/// otherwise forward iteration of the decentralized update. Throws NoConvergence.
EquilibriumSolution decentralized_fixed_point(const SeparableObjective& obj,
                                              const SensitivityModel& model, const Vector& d,
                                              const SolverOptions& options = {});

/// |grad_u(u) + H_diag^T grad_y(H u + d)|, zero exactly at Nash equilibria of
/// the game where agent i minimizes Phi_i(u_i, (H u + d)_i).
double nash_residual(const SeparableObjective& obj, const SensitivityModel& model,
                     const Vector& d, const Vector& u);

/// Agent i's own cost Phi_i(u_i, (H u + d)_i).
double agent_cost(const SeparableObjective& obj, const SensitivityModel& model, const Vector& d,
                  const Vector& u, Eigen::Index i);

/// Brute-force best-response test: true iff agent i cannot lower its own cost
/// by more than `slack` through any unilateral deviation on a uniform grid of
/// `points` offsets over [-radius, radius].
bool best_response_check(const SeparableObjective& obj, const SensitivityModel& model,
                         const Vector& d, const Vector& u, Eigen::Index i, double radius,
                         int points = 201, double slack = 1e-8);

}  // namespace ofo

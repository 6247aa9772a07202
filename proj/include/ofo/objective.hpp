#pragma once

#include "ofo/linalg.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ofo {

/// Scalar cost with its derivative. Callables must be re-entrant.
struct ScalarCost {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/// Smoothness (L) and strong-convexity (m) moduli shared by every agent.
struct CurvatureBounds {
    double L_u = 1.0;
    double m_u = 1.0;
    double L_y = 1.0;
    double m_y = 1.0;
};

/// Parameters of 1/2 (gamma1 |u|^2 + gamma2 |y - y_ref|^2).
struct QuadraticParams {
    double gamma1 = 1.0;
    double gamma2 = 1.0;
    Vector y_ref;
};

/// Separable objective Phi(u, y) = sum_i phi_i^u(u_i) + phi_i^y(y_i).
///
/// The curvature bounds are declared by the caller and must hold for every
/// agent; `check_curvature` samples them.
class SeparableObjective {
public:
    SeparableObjective(std::vector<ScalarCost> input_costs, std::vector<ScalarCost> output_costs,
                       CurvatureBounds bounds);

    Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(input_.size()); }
    const CurvatureBounds& bounds() const noexcept { return bounds_; }

    const ScalarCost& input_cost(Eigen::Index i) const { return input_.at(static_cast<size_t>(i)); }
    const ScalarCost& output_cost(Eigen::Index i) const {
        return output_.at(static_cast<size_t>(i));
    }

    Vector grad_u(const Vector& u) const;
    Vector grad_y(const Vector& y) const;
    double value(const Vector& u, const Vector& y) const;

    /// Set when built by make_quadratic_objective; enables closed-form solves.
    const std::optional<QuadraticParams>& quadratic() const noexcept { return quadratic_; }

private:
    friend SeparableObjective make_quadratic_objective(double, double, Vector);

    std::vector<ScalarCost> input_;
    std::vector<ScalarCost> output_;
    CurvatureBounds bounds_;
    std::optional<QuadraticParams> quadratic_;
};

SeparableObjective make_quadratic_objective(double gamma1, double gamma2, Vector y_ref);

/// Non-quadratic instance: phi^u(u) = m_u/2 u^2 + (L_u - m_u) log cosh(u - u_shift_i),
/// and likewise for y around y_ref. Exactly m-strongly convex and L-smooth.
SeparableObjective make_log_cosh_objective(const CurvatureBounds& bounds, Vector u_shift,
                                           Vector y_ref);

struct CurvatureCheck {
    double min_convexity_margin_u;  ///< min (f'(a)-f'(b))(a-b) - m (a-b)^2
    double min_convexity_margin_y;
    double min_smoothness_margin_u;  ///< min L|a-b| - |f'(a)-f'(b)|
    double min_smoothness_margin_y;
};

/// Samples `pairs` random scalar pairs in [-radius, radius] per agent.
CurvatureCheck check_curvature(const SeparableObjective& obj, int pairs, double radius,
                               unsigned long long seed);

}  // namespace ofo

#pragma once

#include "ofo/linalg.hpp"
#include "ofo/objective.hpp"
#include "ofo/plant.hpp"

#include <string_view>
#include <vector>

namespace ofo {

struct Trajectory;

/// Which aggregate constants to use.
///
/// Paper: the N-scaled aggregates, e.g. m = N m_u + N sigma_min^2(H) m_y.
/// Tight: the same expressions without the factor N. The separable structure
/// makes the blockwise moduli valid, and only Tight yields certificates that
/// survive numerical checks (see the 2x2 regression in the tests).
enum class Convention { Paper, Tight };

std::string_view to_string(Convention c);
Convention parse_convention(std::string_view text);

struct MonotonicityConstants {
    double m = 0.0;  ///< strong convexity of the reduced objective
    double c = 0.0;  ///< coupling penalty of the decentralized map
    double L = 0.0;  ///< smoothness of the reduced objective
    double sigma_max_H = 0.0;
    double sigma_min_H = 0.0;
    double sigma_max_offdiag = 0.0;  ///< sigma_max(H - H_diag)
    Convention convention = Convention::Tight;
};

MonotonicityConstants monotonicity_constants(const SeparableObjective& obj,
                                             const SensitivityModel& model, Convention convention);

/// Diagonal dominance test sigma_max(H - H_diag) <= (m_u + sigma_min^2(H) m_y) / (sigma_max(H) L_y).
/// Identical under both conventions.
struct CouplingCondition {
    bool satisfied = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

CouplingCondition coupling_condition(const SeparableObjective& obj, const SensitivityModel& model);

struct ContractionRate {
    double rho = 1.0;
    bool admissible = false;
    /// Upper end of the certified step interval (0, 2(m-c)/(L^2-m^2)).
    double eta_upper = 0.0;
    /// True when L == m and the interval formula degenerates; eta_upper is +inf.
    bool degenerate = false;
    /// rho < 1 holds exactly for eta in (0, 2(m-c)/(L^2-c^2)). This is shorter
    /// than eta_upper whenever c < m < L, so eta_upper alone does not imply rho < 1.
    double eta_rho_below_one = 0.0;
};

/// rho = sqrt(1 - 2 m eta + L^2 eta^2) + c eta. Throws CouplingTooStrong if m <= c.
ContractionRate contraction_rate(const MonotonicityConstants& consts, double eta);

/// Per-step verification of the tracking bound along a decentralized
/// algebraic trajectory:
///   |u_{k+1}-u*| <= rho |u_k-u*| + eta |(H^T - H_diag) grad_y(y*)| + 1e-9
/// and its telescoped form from u_0.
struct TrackingCheck {
    std::vector<bool> one_step;    ///< entry k covers the step k -> k+1
    std::vector<bool> telescoped;  ///< entry k covers |u_k - u*|
    double rho = 1.0;
    double bias = 0.0;
    bool admissible = false;

    bool all_pass() const;
};

TrackingCheck tracking_inequality_check(const Trajectory& trajectory, const Vector& u_star,
                                        const Vector& y_star, const SeparableObjective& obj,
                                        const SensitivityModel& model,
                                        const MonotonicityConstants& consts, double eta);

/// |(H^T - H_diag) grad_y(y_inf)| sqrt(1/(2m - 1)), applicable when 2m > 1 and
/// the coupling condition holds. When 2m <= 1 the bound is +inf.
struct SuboptimalityBound {
    double bound = 0.0;
    bool applicable = false;
};

SuboptimalityBound suboptimality_bound(const SeparableObjective& obj,
                                       const SensitivityModel& model, const Vector& d,
                                       const Vector& u_inf, const MonotonicityConstants& consts);

enum class EtaBranch { Eta1, Eta2 };

std::string_view to_string(EtaBranch b);

/// Constants of the combined-error certificate for the LTI interconnection.
///
///   Xi = [[lambda_max(A^T A) + a3 eta^2 + a4 eta,  a1 eta^2 + a2 eta],
///         [a1 eta^2 + a2 eta,                      1 - m' eta + L' eta^2]]
struct LtiRateCertificate {
    Eigen::Matrix2d xi = Eigen::Matrix2d::Zero();
    double lambda_max = 0.0;
    double m_prime = 0.0;
    double L_prime = 0.0;
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
    double t = 0.0;  ///< 1 - lambda_max(A^T A)
    double eta = 0.0;
    Convention convention = Convention::Tight;

    /// a3 m' + 2 a1 a2 - a4 L', the eta^2 coefficient of the Schur-complement test.
    double quadratic_coefficient() const;
    /// a4 m' + a2^2 + t L', the eta coefficient.
    double linear_coefficient() const;
    EtaBranch branch() const;
};

/// Throws CouplingTooStrong if m' <= 0. The model must carry H_x.
LtiRateCertificate xi_matrix(const LtiPlant& plant, const SeparableObjective& obj,
                             const SensitivityModel& model, double eta, Convention convention);

struct StepSizeCertificate {
    double eta_star = 0.0;
    EtaBranch branch = EtaBranch::Eta2;
    bool capped = false;  ///< eta_star was limited by m'/L'
    double m_prime = 0.0;
    double L_prime = 0.0;
    double t = 0.0;
};

/// Largest certified step for the LTI loop, capped at m'/L'.
/// Throws NotCertifiable when m' <= 0 or t <= 0.
StepSizeCertificate eta_star(const LtiPlant& plant, const SeparableObjective& obj,
                             const SensitivityModel& model, Convention convention);

/// Pseudo-gradient F(u) = grad_u(u) + H_diag^T grad_y(H u + d).
Vector pseudo_gradient(const SeparableObjective& obj, const SensitivityModel& model,
                       const Vector& d, const Vector& u);

/// Gradient of the reduced objective, grad_u(u) + H^T grad_y(H u + d).
Vector reduced_gradient(const SeparableObjective& obj, const SensitivityModel& model,
                        const Vector& d, const Vector& u);

/// min over random pairs in [-10, 10]^N of <F(u1)-F(u2), u1-u2> - (m-c)|u1-u2|^2.
double monotonicity_gap_test(const SeparableObjective& obj, const SensitivityModel& model,
                             const Vector& d, const MonotonicityConstants& consts, int trials,
                             unsigned long long seed);

}  // namespace ofo

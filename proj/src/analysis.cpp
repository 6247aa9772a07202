#include "ofo/analysis.hpp"

#include "ofo/errors.hpp"
#include "ofo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace ofo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double scale_of(Convention c, Eigen::Index n_agents) {
    return c == Convention::Paper ? static_cast<double>(n_agents) : 1.0;
}

void check_agents(const SeparableObjective& obj, const SensitivityModel& model) {
    if (obj.size() != model.n_agents())
        throw DimensionMismatch("objective and sensitivity model disagree on agent count");
}

}  // namespace

std::string_view to_string(Convention c) { return c == Convention::Paper ? "paper" : "tight"; }

Convention parse_convention(std::string_view text) {
    if (text == "paper") return Convention::Paper;
    if (text == "tight") return Convention::Tight;
    throw ParseError("convention", "expected 'paper' or 'tight', got '" + std::string(text) + "'");
}

std::string_view to_string(EtaBranch b) { return b == EtaBranch::Eta1 ? "eta1" : "eta2"; }

MonotonicityConstants monotonicity_constants(const SeparableObjective& obj,
                                             const SensitivityModel& model, Convention convention) {
    check_agents(obj, model);
    const auto& b = obj.bounds();
    MonotonicityConstants k;
    k.convention = convention;
    k.sigma_max_H = sigma_max(model.H);
    k.sigma_min_H = sigma_min(model.H);
    k.sigma_max_offdiag = sigma_max(model.H - model.H_diag);
    const double n = scale_of(convention, model.n_agents());
    k.m = n * b.m_u + n * k.sigma_min_H * k.sigma_min_H * b.m_y;
    k.c = n * k.sigma_max_offdiag * k.sigma_max_H * b.L_y;
    k.L = n * b.L_u + n * k.sigma_max_H * k.sigma_max_H * b.L_y;
    return k;
}

CouplingCondition coupling_condition(const SeparableObjective& obj, const SensitivityModel& model) {
    // Tight constants: the factor N cancels from both sides of m > c.
    const auto k = monotonicity_constants(obj, model, Convention::Tight);
    const auto& b = obj.bounds();
    CouplingCondition cc;
    cc.lhs = k.sigma_max_offdiag;
    cc.rhs = k.sigma_max_H > 0.0
                 ? (b.m_u + k.sigma_min_H * k.sigma_min_H * b.m_y) / (k.sigma_max_H * b.L_y)
                 : kInf;
    cc.satisfied = cc.lhs <= cc.rhs;
    return cc;
}

ContractionRate contraction_rate(const MonotonicityConstants& k, double eta) {
    if (k.m <= k.c)
        throw CouplingTooStrong("coupling penalty c = " + std::to_string(k.c) +
                                " is not below m = " + std::to_string(k.m));
    ContractionRate r;
    r.rho = std::sqrt(std::max(0.0, 1.0 - 2.0 * k.m * eta + k.L * k.L * eta * eta)) + k.c * eta;
    const double denom = k.L * k.L - k.m * k.m;
    if (denom <= 1e-14 * k.L * k.L) {
        r.degenerate = true;
        r.eta_upper = kInf;
    } else {
        r.eta_upper = 2.0 * (k.m - k.c) / denom;
    }
    r.eta_rho_below_one = 2.0 * (k.m - k.c) / (k.L * k.L - k.c * k.c);
    r.admissible = eta > 0.0 && eta < r.eta_upper && r.rho < 1.0;
    return r;
}

bool TrackingCheck::all_pass() const {
    return std::all_of(one_step.begin(), one_step.end(), [](bool b) { return b; }) &&
           std::all_of(telescoped.begin(), telescoped.end(), [](bool b) { return b; });
}

TrackingCheck tracking_inequality_check(const Trajectory& trajectory, const Vector& u_star,
                                        const Vector& y_star, const SeparableObjective& obj,
                                        const SensitivityModel& model,
                                        const MonotonicityConstants& k, double eta) {
    check_agents(obj, model);
    require_size(u_star, model.n_agents(), "u_star");
    require_size(y_star, model.n_agents(), "y_star");
    constexpr double slack = 1e-9;

    TrackingCheck out;
    out.rho = std::sqrt(std::max(0.0, 1.0 - 2.0 * k.m * eta + k.L * k.L * eta * eta)) + k.c * eta;
    out.admissible = k.m > k.c && contraction_rate(k, eta).admissible;
    out.bias = ((model.H.transpose() - model.H_diag) * obj.grad_y(y_star)).norm();

    const auto& us = trajectory.u;
    if (us.empty()) return out;
    const double e0 = (us.front() - u_star).norm();
    double rho_pow = 1.0;
    double geometric_sum = 0.0;
    for (size_t j = 0; j < us.size(); ++j) {
        const double ej = (us[j] - u_star).norm();
        out.telescoped.push_back(ej <= rho_pow * e0 + eta * out.bias * geometric_sum + slack);
        if (j + 1 < us.size()) {
            const double next = (us[j + 1] - u_star).norm();
            out.one_step.push_back(next <= out.rho * ej + eta * out.bias + slack);
        }
        geometric_sum += rho_pow;
        rho_pow *= out.rho;
    }
    return out;
}

SuboptimalityBound suboptimality_bound(const SeparableObjective& obj,
                                       const SensitivityModel& model, const Vector& d,
                                       const Vector& u_inf, const MonotonicityConstants& k) {
    check_agents(obj, model);
    const Vector y_inf = steady_state_output(model, u_inf, d);
    const double coupling = ((model.H.transpose() - model.H_diag) * obj.grad_y(y_inf)).norm();
    SuboptimalityBound out;
    const bool strongly_convex_enough = 2.0 * k.m > 1.0;
    out.bound = strongly_convex_enough ? coupling * std::sqrt(1.0 / (2.0 * k.m - 1.0)) : kInf;
    out.applicable = strongly_convex_enough && coupling_condition(obj, model).satisfied;
    return out;
}

double LtiRateCertificate::quadratic_coefficient() const {
    return a3 * m_prime + 2.0 * a1 * a2 - a4 * L_prime;
}

double LtiRateCertificate::linear_coefficient() const {
    return a4 * m_prime + a2 * a2 + t * L_prime;
}

EtaBranch LtiRateCertificate::branch() const {
    return quadratic_coefficient() > 0.0 ? EtaBranch::Eta1 : EtaBranch::Eta2;
}

namespace {

struct LtiConstants {
    double lambda_AtA, m_prime, L_prime, a1, a2, a3, a4, t;
};

LtiConstants lti_constants(const LtiPlant& plant, const SeparableObjective& obj,
                           const SensitivityModel& model, Convention convention) {
    check_agents(obj, model);
    if (!model.has_state_map())
        throw DimensionMismatch("LTI certificate needs a model with the state map H_x");
    if (model.H_x.rows() != plant.n_states() || model.H.rows() != plant.n_agents())
        throw DimensionMismatch("sensitivity model does not belong to this plant");

    const auto& b = obj.bounds();
    const double n = scale_of(convention, model.n_agents());
    const Matrix& A = plant.A();
    const Matrix& C = plant.C();
    const Matrix& Hx = model.H_x;

    const double s_H = sigma_max(model.H);
    const double s_min_H = sigma_min(model.H);
    const double s_off = sigma_max(model.H_diag - model.H);
    const double s_diag = sigma_max(model.H_diag);
    const double s_C = sigma_max(C);
    const double s_min_C = sigma_min(C);
    // H_x^T A is rectangular when n_states != N; its largest singular value is
    // the Cauchy-Schwarz factor the certificate needs.
    const double s_HxA = sigma_max(Hx.transpose() * A);
    const double s_Hx = sigma_max(Hx);
    const double lambda_HxHx_I = s_Hx * s_Hx + 1.0;
    const double sA = sigma_max(A);

    const double grad_lipschitz = n * b.L_u + n * b.L_y * s_diag * s_H;

    LtiConstants k{};
    k.lambda_AtA = sA * sA;
    k.m_prime = 2.0 * (n * b.m_u + n * b.m_y * s_min_H * s_min_H - n * b.L_y * s_off * s_H);
    k.L_prime = lambda_HxHx_I * grad_lipschitz * grad_lipschitz;
    k.a1 = lambda_HxHx_I * n * b.L_y * s_diag * s_C * grad_lipschitz;
    k.a2 = s_HxA * grad_lipschitz + 2.0 * n * b.m_y * s_C * s_H + n * b.L_y * s_C * (s_off + s_H);
    k.a3 = lambda_HxHx_I * n * n * b.L_y * b.L_y * s_diag * s_diag * s_C * s_C;
    k.a4 = 2.0 * (s_HxA * s_diag * s_C - (n * b.m_y * s_min_C * s_min_C - n * b.L_y * s_C * s_C));
    k.t = 1.0 - k.lambda_AtA;
    return k;
}

}  // namespace

LtiRateCertificate xi_matrix(const LtiPlant& plant, const SeparableObjective& obj,
                             const SensitivityModel& model, double eta, Convention convention) {
    const LtiConstants k = lti_constants(plant, obj, model, convention);
    if (k.m_prime <= 0.0)
        throw CouplingTooStrong("m' = " + std::to_string(k.m_prime) + " is not positive");

    LtiRateCertificate cert;
    cert.convention = convention;
    cert.eta = eta;
    cert.m_prime = k.m_prime;
    cert.L_prime = k.L_prime;
    cert.a1 = k.a1;
    cert.a2 = k.a2;
    cert.a3 = k.a3;
    cert.a4 = k.a4;
    cert.t = k.t;

    const double off = k.a1 * eta * eta + k.a2 * eta;
    cert.xi << k.lambda_AtA + k.a3 * eta * eta + k.a4 * eta, off, off,
        1.0 - k.m_prime * eta + k.L_prime * eta * eta;
    // closed-form largest eigenvalue of a symmetric 2x2
    const double mean = 0.5 * (cert.xi(0, 0) + cert.xi(1, 1));
    const double half_gap = 0.5 * (cert.xi(0, 0) - cert.xi(1, 1));
    cert.lambda_max = mean + std::hypot(half_gap, off);
    return cert;
}

StepSizeCertificate eta_star(const LtiPlant& plant, const SeparableObjective& obj,
                             const SensitivityModel& model, Convention convention) {
    const LtiConstants k = lti_constants(plant, obj, model, convention);
    if (k.m_prime <= 0.0)
        throw NotCertifiable("m' = " + std::to_string(k.m_prime) +
                             " is not positive (coupling too strong)");
    if (k.t <= 0.0)
        throw NotCertifiable("lambda_max(A^T A) = " + std::to_string(k.lambda_AtA) +
                             " is not below 1");

    const double q2 = k.a3 * k.m_prime + 2.0 * k.a1 * k.a2 - k.a4 * k.L_prime;
    const double q1 = k.a4 * k.m_prime + k.a2 * k.a2 + k.t * k.L_prime;
    const double q0 = k.t * k.m_prime;

    StepSizeCertificate out;
    out.m_prime = k.m_prime;
    out.L_prime = k.L_prime;
    out.t = k.t;
    if (q2 > 0.0) {
        out.branch = EtaBranch::Eta1;
        out.eta_star = (std::sqrt(q1 * q1 + 4.0 * q0 * q2) - q1) / (2.0 * q2);
    } else {
        out.branch = EtaBranch::Eta2;
        // q2 <= 0 and q1 <= 0: the quadratic is negative for every eta > 0
        out.eta_star = q1 > 0.0 ? q0 / q1 : kInf;
    }
    const double cap = k.m_prime / k.L_prime;
    if (cap < out.eta_star) {
        out.eta_star = cap;
        out.capped = true;
    }
    return out;
}

Vector pseudo_gradient(const SeparableObjective& obj, const SensitivityModel& model,
                       const Vector& d, const Vector& u) {
    check_agents(obj, model);
    return obj.grad_u(u) + model.H_diag.transpose() * obj.grad_y(steady_state_output(model, u, d));
}

Vector reduced_gradient(const SeparableObjective& obj, const SensitivityModel& model,
                        const Vector& d, const Vector& u) {
    check_agents(obj, model);
    return obj.grad_u(u) + model.H.transpose() * obj.grad_y(steady_state_output(model, u, d));
}

double monotonicity_gap_test(const SeparableObjective& obj, const SensitivityModel& model,
                             const Vector& d, const MonotonicityConstants& k, int trials,
                             unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    const Eigen::Index n = model.n_agents();
    double worst = kInf;
    for (int t = 0; t < trials; ++t) {
        Vector u1(n), u2(n);
        for (Eigen::Index i = 0; i < n; ++i) u1(i) = dist(rng);
        for (Eigen::Index i = 0; i < n; ++i) u2(i) = dist(rng);
        const Vector diff = u1 - u2;
        const double gap =
            (pseudo_gradient(obj, model, d, u1) - pseudo_gradient(obj, model, d, u2)).dot(diff) -
            (k.m - k.c) * diff.squaredNorm();
        worst = std::min(worst, gap);
    }
    return worst;
}

}  // namespace ofo

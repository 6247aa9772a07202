#include "ofo/objective.hpp"

#include "ofo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ofo {

namespace {

double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace

SeparableObjective::SeparableObjective(std::vector<ScalarCost> input_costs,
                                       std::vector<ScalarCost> output_costs,
                                       CurvatureBounds bounds)
    : input_(std::move(input_costs)), output_(std::move(output_costs)), bounds_(bounds) {
    if (input_.size() != output_.size())
        throw DimensionMismatch("input and output cost lists differ in length");
    if (input_.empty()) throw DimensionMismatch("objective needs at least one agent");
    if (!(bounds_.m_u > 0.0 && bounds_.m_u <= bounds_.L_u && bounds_.m_y > 0.0 &&
          bounds_.m_y <= bounds_.L_y))
        throw Error("curvature bounds must satisfy 0 < m <= L");
    for (const auto& c : input_)
        if (!c.value || !c.derivative) throw Error("input cost is missing a callable");
    for (const auto& c : output_)
        if (!c.value || !c.derivative) throw Error("output cost is missing a callable");
}

Vector SeparableObjective::grad_u(const Vector& u) const {
    require_size(u, size(), "u");
    Vector g(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) g(i) = input_[static_cast<size_t>(i)].derivative(u(i));
    return g;
}

Vector SeparableObjective::grad_y(const Vector& y) const {
    require_size(y, size(), "y");
    Vector g(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) g(i) = output_[static_cast<size_t>(i)].derivative(y(i));
    return g;
}

double SeparableObjective::value(const Vector& u, const Vector& y) const {
    require_size(u, size(), "u");
    require_size(y, size(), "y");
    double total = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const auto k = static_cast<size_t>(i);
        total += input_[k].value(u(i)) + output_[k].value(y(i));
    }
    return total;
}

SeparableObjective make_quadratic_objective(double gamma1, double gamma2, Vector y_ref) {
    if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw Error("quadratic weights must be positive");
    if (y_ref.size() == 0) throw DimensionMismatch("y_ref must be non-empty");
    std::vector<ScalarCost> in, out;
    for (Eigen::Index i = 0; i < y_ref.size(); ++i) {
        const double r = y_ref(i);
        in.push_back({[gamma1](double u) { return 0.5 * gamma1 * u * u; },
                      [gamma1](double u) { return gamma1 * u; }});
        out.push_back({[gamma2, r](double y) { return 0.5 * gamma2 * (y - r) * (y - r); },
                       [gamma2, r](double y) { return gamma2 * (y - r); }});
    }
    SeparableObjective obj(std::move(in), std::move(out), {gamma1, gamma1, gamma2, gamma2});
    obj.quadratic_ = QuadraticParams{gamma1, gamma2, std::move(y_ref)};
    return obj;
}

SeparableObjective make_log_cosh_objective(const CurvatureBounds& b, Vector u_shift,
                                           Vector y_ref) {
    require_size(u_shift, y_ref.size(), "u_shift");
    std::vector<ScalarCost> in, out;
    for (Eigen::Index i = 0; i < y_ref.size(); ++i) {
        const double s = u_shift(i);
        const double r = y_ref(i);
        const double ku = b.L_u - b.m_u;
        const double ky = b.L_y - b.m_y;
        in.push_back({[m = b.m_u, ku, s](double u) { return 0.5 * m * u * u + ku * log_cosh(u - s); },
                      [m = b.m_u, ku, s](double u) { return m * u + ku * std::tanh(u - s); }});
        out.push_back(
            {[m = b.m_y, ky, r](double y) { return 0.5 * m * (y - r) * (y - r) + ky * log_cosh(y - r); },
             [m = b.m_y, ky, r](double y) { return m * (y - r) + ky * std::tanh(y - r); }});
    }
    return SeparableObjective(std::move(in), std::move(out), b);
}

CurvatureCheck check_curvature(const SeparableObjective& obj, int pairs, double radius,
                               unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-radius, radius);
    constexpr double inf = std::numeric_limits<double>::infinity();
    CurvatureCheck out{inf, inf, inf, inf};
    const auto& b = obj.bounds();
    for (Eigen::Index i = 0; i < obj.size(); ++i) {
        for (int p = 0; p < pairs; ++p) {
            const double a = dist(rng);
            const double c = dist(rng);
            const double du = obj.input_cost(i).derivative(a) - obj.input_cost(i).derivative(c);
            const double dy = obj.output_cost(i).derivative(a) - obj.output_cost(i).derivative(c);
            const double h = a - c;
            out.min_convexity_margin_u = std::min(out.min_convexity_margin_u, du * h - b.m_u * h * h);
            out.min_convexity_margin_y = std::min(out.min_convexity_margin_y, dy * h - b.m_y * h * h);
            out.min_smoothness_margin_u =
                std::min(out.min_smoothness_margin_u, b.L_u * std::abs(h) - std::abs(du));
            out.min_smoothness_margin_y =
                std::min(out.min_smoothness_margin_y, b.L_y * std::abs(h) - std::abs(dy));
        }
    }
    return out;
}

}  // namespace ofo

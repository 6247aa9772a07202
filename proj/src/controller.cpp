#include "ofo/controller.hpp"

#include "ofo/errors.hpp"

#include <cmath>
#include <string>

namespace ofo {

std::string_view to_string(Mode mode) {
    return mode == Mode::Centralized ? "centralized" : "decentralized";
}

Mode parse_mode(std::string_view text) {
    if (text == "centralized") return Mode::Centralized;
    if (text == "decentralized") return Mode::Decentralized;
    throw ParseError("mode", "expected 'centralized' or 'decentralized', got '" +
                                 std::string(text) + "'");
}

void ControllerConfig::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ParseError("eta", "step size must be positive");
}

namespace {

void check_dims(const SeparableObjective& obj, const SensitivityModel& model, const Vector& u,
                const Vector& y) {
    if (obj.size() != model.n_agents())
        throw DimensionMismatch("objective and sensitivity model disagree on agent count");
    require_size(u, model.n_agents(), "u");
    require_size(y, model.n_agents(), "y");
}

}  // namespace

Vector centralized_step(const ControllerConfig& cfg, const SeparableObjective& obj,
                        const SensitivityModel& model, const Vector& u, const Vector& y) {
    if (cfg.mode != Mode::Centralized)
        throw std::invalid_argument("centralized_step called with a decentralized config");
    cfg.validate();
    check_dims(obj, model, u, y);
    return u - cfg.eta * (obj.grad_u(u) + model.H.transpose() * obj.grad_y(y));
}

Vector decentralized_step(const ControllerConfig& cfg, const SeparableObjective& obj,
                          const SensitivityModel& model, const Vector& u, const Vector& y) {
    if (cfg.mode != Mode::Decentralized)
        throw std::invalid_argument("decentralized_step called with a centralized config");
    cfg.validate();
    check_dims(obj, model, u, y);
    Vector next(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double local_grad = obj.input_cost(i).derivative(u(i)) +
                                  model.H_diag(i, i) * obj.output_cost(i).derivative(y(i));
        next(i) = u(i) - cfg.eta * local_grad;
    }
    return next;
}

Vector controller_step(const ControllerConfig& cfg, const SeparableObjective& obj,
                       const SensitivityModel& model, const Vector& u, const Vector& y) {
    return cfg.mode == Mode::Centralized ? centralized_step(cfg, obj, model, u, y)
                                         : decentralized_step(cfg, obj, model, u, y);
}

}  // namespace ofo

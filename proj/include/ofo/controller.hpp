#pragma once

#include "ofo/linalg.hpp"
#include "ofo/objective.hpp"
#include "ofo/plant.hpp"

#include <string_view>

namespace ofo {

enum class Mode { Centralized, Decentralized };

std::string_view to_string(Mode mode);
/// Accepts "centralized" / "decentralized"; throws ParseError otherwise.
Mode parse_mode(std::string_view text);

struct ControllerConfig {
    Mode mode = Mode::Decentralized;
    double eta = 0.05;

    /// Throws if eta is not a positive finite number.
    void validate() const;
};

/// u - eta (grad_u Phi(u) + H^T grad_y Phi(y)), using measured y.
Vector centralized_step(const ControllerConfig& cfg, const SeparableObjective& obj,
                        const SensitivityModel& model, const Vector& u, const Vector& y);

/// u - eta (grad_u Phi(u) + H_diag^T grad_y Phi(y)). Agent i only reads
/// u_i, y_i and H_ii.
Vector decentralized_step(const ControllerConfig& cfg, const SeparableObjective& obj,
                          const SensitivityModel& model, const Vector& u, const Vector& y);

/// Dispatches on cfg.mode.
Vector controller_step(const ControllerConfig& cfg, const SeparableObjective& obj,
                       const SensitivityModel& model, const Vector& u, const Vector& y);

}  // namespace ofo

#pragma once

#include "ofo/controller.hpp"
#include "ofo/errors.hpp"
#include "ofo/linalg.hpp"
#include "ofo/objective.hpp"
#include "ofo/plant.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace ofo {

enum class PlantKind { Algebraic, Lti };

std::string_view to_string(PlantKind kind);

struct TrajectoryInfo {
    Mode mode = Mode::Decentralized;
    double eta = 0.0;
    PlantKind plant = PlantKind::Algebraic;
    std::size_t iterations = 0;  ///< controller updates performed
    bool converged = false;      ///< stopped early on the |du| tolerance
    std::uint64_t seed = 0;
};

/// Closed-loop samples. Entry k of u, y (and x for LTI runs) belong to the
/// same time instant: y_k is the measurement the controller read at step k.
/// All series have iterations + 1 entries.
struct Trajectory {
    std::vector<Vector> u;
    std::vector<Vector> y;
    std::vector<Vector> x;  ///< empty for algebraic runs
    TrajectoryInfo info;

    std::size_t size() const noexcept { return u.size(); }
};

/// An iterate left the finite range. Carries the samples recorded up to and
/// including the last finite one.
class NonFinite : public Error {
public:
    NonFinite(std::size_t step, Trajectory partial);

    std::size_t step() const noexcept { return step_; }
    const Trajectory& partial() const noexcept { return partial_; }

private:
    std::size_t step_;
    Trajectory partial_;
};

struct RunOptions {
    std::size_t steps = 100'000;
    double stop_tolerance = 1e-12;  ///< early stop on |u_{k+1} - u_k|
};

/// y_k = H u_k + d, then the configured controller update.
Trajectory run_algebraic(const SensitivityModel& model, const SeparableObjective& obj,
                         const Vector& d, const ControllerConfig& cfg, const Vector& u0,
                         const RunOptions& options);

/// Synchronous LTI interconnection: y_k from (x_k, u_k), then u_{k+1} from
/// y_k and x_{k+1} = A x_k + B u_k. Early stop needs both |du| and |dx| below
/// the tolerance.
Trajectory run_lti(const LtiPlant& plant, const SeparableObjective& obj,
                   const ControllerConfig& cfg, const Vector& x0, const Vector& u0,
                   const RunOptions& options);

struct ErrorMetrics {
    std::vector<double> rel_err_u;
    /// |x_k - H_x u_k|^2 + |u_k - u_ref|^2, LTI runs only.
    std::optional<std::vector<double>> combined_sq;
    /// Set when u_ref = 0 and rel_err_u holds absolute errors instead.
    bool absolute = false;
};

ErrorMetrics metrics(const Trajectory& trajectory, const Vector& u_ref,
                     const SensitivityModel& model);

}  // namespace ofo

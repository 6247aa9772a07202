#pragma once

#include "ofo/linalg.hpp"

namespace ofo {

/// Discrete-time LTI network plant
///
///   x_{k+1} = A x_k + B u_k
///   y_k     = C x_k + D u_k + d
///
/// with N scalar agents (u, y, d in R^N) and n states. The square case has
/// n = N; the grid model uses n = 17 states for N = 8 agents, so B is n x N
/// and C is N x n. Construction validates dimensions, finiteness and Schur
/// stability of A.
class LtiPlant {
public:
    LtiPlant(Matrix A, Matrix B, Matrix C, Matrix D, Vector d);

    const Matrix& A() const noexcept { return A_; }
    const Matrix& B() const noexcept { return B_; }
    const Matrix& C() const noexcept { return C_; }
    const Matrix& D() const noexcept { return D_; }
    const Vector& d() const noexcept { return d_; }

    Eigen::Index n_agents() const noexcept { return D_.rows(); }
    Eigen::Index n_states() const noexcept { return A_.rows(); }
    double spectral_radius() const noexcept { return spectral_radius_; }

private:
    Matrix A_, B_, C_, D_;
    Vector d_;
    double spectral_radius_ = 0.0;
};

/// Steady-state sensitivities of a plant: H = C H_x + D with H_x = (I - A)^{-1} B.
/// H_x is empty when the model was built directly from a steady-state map.
struct SensitivityModel {
    Matrix H;
    Matrix H_diag;
    Matrix H_x;

    /// Algebraic-only model (no state dynamics).
    static SensitivityModel from_map(Matrix H);

    Eigen::Index n_agents() const noexcept { return H.rows(); }
    bool has_state_map() const noexcept { return H_x.size() != 0; }
};

SensitivityModel compute_sensitivity(const LtiPlant& plant);

/// Raw form used for plants that have not been validated. Throws
/// SingularMatrix when (I - A) is numerically singular.
SensitivityModel compute_sensitivity(const Matrix& A, const Matrix& B, const Matrix& C,
                                     const Matrix& D);

struct PlantStep {
    Vector x_next;
    Vector y;
};

PlantStep step(const LtiPlant& plant, const Vector& x, const Vector& u);

/// y = H u + d
Vector steady_state_output(const SensitivityModel& model, const Vector& u, const Vector& d);

struct SchurStability {
    bool stable = false;
    double spectral_radius = 0.0;
};

/// Stable iff the spectral radius is below 1 - 1e-9.
SchurStability is_schur_stable(const Matrix& A);

}  // namespace ofo

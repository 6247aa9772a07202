#include "ofo/plant.hpp"

#include "ofo/errors.hpp"

#include <string>

namespace ofo {

namespace {

constexpr double kStabilityTol = 1e-9;

void require_shape(const Matrix& M, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (M.rows() != rows || M.cols() != cols)
        throw DimensionMismatch(std::string(name) + ": expected " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", got " + std::to_string(M.rows()) + "x" +
                                std::to_string(M.cols()));
}

}  // namespace

LtiPlant::LtiPlant(Matrix A, Matrix B, Matrix C, Matrix D, Vector d)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)), d_(std::move(d)) {
    const Eigen::Index n = A_.rows();
    const Eigen::Index N = D_.rows();
    if (n == 0 || N == 0) throw DimensionMismatch("plant must have at least one state and agent");
    require_shape(A_, n, n, "A");
    require_shape(B_, n, N, "B");
    require_shape(C_, N, n, "C");
    require_shape(D_, N, N, "D");
    require_size(d_, N, "d");
    if (!A_.allFinite() || !B_.allFinite() || !C_.allFinite() || !D_.allFinite() ||
        !d_.allFinite())
        throw Error("plant matrices must be finite");
    const SchurStability s = is_schur_stable(A_);
    spectral_radius_ = s.spectral_radius;
    if (!s.stable) throw UnstablePlant(s.spectral_radius);
}

SensitivityModel SensitivityModel::from_map(Matrix H) {
    if (H.rows() != H.cols()) throw DimensionMismatch("sensitivity map must be square");
    SensitivityModel model;
    model.H_diag = H.diagonal().asDiagonal();
    model.H = std::move(H);
    return model;
}

SensitivityModel compute_sensitivity(const Matrix& A, const Matrix& B, const Matrix& C,
                                     const Matrix& D) {
    const Eigen::Index n = A.rows();
    require_shape(A, n, n, "A");
    require_shape(B, n, D.cols(), "B");
    require_shape(C, D.rows(), n, "C");

    const Matrix I_minus_A = Matrix::Identity(n, n) - A;
    Eigen::FullPivLU<Matrix> lu(I_minus_A);
    // rank test with a relative threshold; partial-pivot LU alone reports no rank
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw SingularMatrix("I - A is numerically singular");

    Eigen::PartialPivLU<Matrix> solver(I_minus_A);
    SensitivityModel model;
    model.H_x = solver.solve(B);
    model.H = C * model.H_x + D;
    model.H_diag = model.H.diagonal().asDiagonal();
    return model;
}

SensitivityModel compute_sensitivity(const LtiPlant& plant) {
    return compute_sensitivity(plant.A(), plant.B(), plant.C(), plant.D());
}

PlantStep step(const LtiPlant& plant, const Vector& x, const Vector& u) {
    require_size(x, plant.n_states(), "state");
    require_size(u, plant.n_agents(), "input");
    return {plant.A() * x + plant.B() * u, plant.C() * x + plant.D() * u + plant.d()};
}

Vector steady_state_output(const SensitivityModel& model, const Vector& u, const Vector& d) {
    require_size(u, model.n_agents(), "input");
    require_size(d, model.n_agents(), "disturbance");
    return model.H * u + d;
}

SchurStability is_schur_stable(const Matrix& A) {
    const double radius = spectral_radius(A);
    return {radius < 1.0 - kStabilityTol, radius};
}

}  // namespace ofo

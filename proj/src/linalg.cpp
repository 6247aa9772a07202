#include "ofo/linalg.hpp"

#include "ofo/errors.hpp"

#include <string>

namespace ofo {

namespace {
constexpr double kFlushRatio = 1e-12;
}

Vector singular_values(const Matrix& M) {
    if (M.size() == 0) return Vector{};
    Eigen::JacobiSVD<Matrix> svd(M);
    Vector s = svd.singularValues();
    const double cutoff = kFlushRatio * s(0);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) < cutoff) s(i) = 0.0;
    return s;
}

double sigma_max(const Matrix& M) {
    const Vector s = singular_values(M);
    return s.size() == 0 ? 0.0 : s(0);
}

double sigma_min(const Matrix& M) {
    const Vector s = singular_values(M);
    return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

double lambda_max_symmetric(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

double spectral_radius(const Matrix& A) {
    if (A.rows() != A.cols())
        throw DimensionMismatch("spectral radius needs a square matrix");
    if (A.size() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> eig(A, false);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

bool all_finite(const Matrix& M) { return M.allFinite(); }

void require_size(const Vector& v, Eigen::Index n, std::string_view what) {
    if (v.size() != n)
        throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(n) +
                                ", got " + std::to_string(v.size()));
}

}  // namespace ofo

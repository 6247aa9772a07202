#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>

namespace ofo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Singular values in decreasing order. Values below 1e-12 * sigma_max are
/// flushed to zero.
Vector singular_values(const Matrix& M);

double sigma_max(const Matrix& M);

/// Smallest of the min(rows, cols) singular values (after flushing).
double sigma_min(const Matrix& M);

/// Largest eigenvalue of a symmetric matrix.
double lambda_max_symmetric(const Matrix& S);

/// Largest modulus among the eigenvalues of a square matrix.
double spectral_radius(const Matrix& A);

bool all_finite(const Matrix& M);

/// Throws DimensionMismatch naming `what` unless v has exactly n entries.
void require_size(const Vector& v, Eigen::Index n, std::string_view what);

}  // namespace ofo

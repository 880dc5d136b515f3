#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sigsub/series.hpp"

namespace sigsub {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// L x K Hankel trajectory matrix of a series of length N, K = N - L + 1;
// entry (i,j) = values[i+j].
Matrix embed(const std::vector<double>& values, int window);
inline Matrix embed(const Series& s, int window) { return embed(s.values, window); }

// Replace each anti-diagonal by its arithmetic mean. Linear, idempotent and a
// contraction in the max norm.
Matrix hankelize(const Matrix& m);

// Inverse of embed for Hankel matrices (checked within relative tolerance).
std::vector<double> matrix_to_series(const Matrix& m, double rel_tol = 1e-12);

// Largest singular value, computed from a symmetric eigensolve of the smaller
// Gram matrix.
double spectral_norm(const Matrix& m);
double max_norm(const Matrix& m);

void matrix_to_csv(const Matrix& m, const std::string& path);
Matrix matrix_from_csv(const std::string& path);

}  // namespace sigsub

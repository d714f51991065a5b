#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qpt {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Dense linear-algebra helpers shared by every module. Bipartite operators
/// on C^da ⊗ C^db use the row-major index a * db + b (first factor outer).
namespace linalg {

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

/// Traces out the second factor of a (da*db)x(da*db) operator.
Matrix partial_trace_second(const Matrix& m, int da, int db);
/// Traces out the first factor.
Matrix partial_trace_first(const Matrix& m, int da, int db);

/// Eigenvalues of a Hermitian matrix in ascending order. Only the lower
/// triangle is read.
RealVector hermitian_eigenvalues(const Matrix& m);

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};
HermitianEigen hermitian_eigen(const Matrix& m);

Matrix hermitian_part(const Matrix& m);
double max_abs(const Matrix& m);
double min_eigenvalue(const Matrix& m);

/// Trace norm distance 0.5 * ||a - b||_1 for Hermitian a, b.
double trace_distance(const Matrix& a, const Matrix& b);

/// Principal square root of a positive semidefinite matrix; negative
/// eigenvalues are clipped to zero.
Matrix psd_sqrt(const Matrix& m);

/// Von Neumann entropy in bits. Eigenvalues at or below `floor` count as
/// zero, so slightly negative estimates do not produce NaNs.
double von_neumann_entropy(const Matrix& rho, double floor = 1e-14);
/// Shannon entropy in bits of a nonnegative weight list.
double shannon_entropy(const std::vector<double>& p, double floor = 1e-14);
double entropy_of_spectrum(const RealVector& eigenvalues, double floor = 1e-14);

Matrix projector(const Vector& v);

}  // namespace linalg
}  // namespace qpt

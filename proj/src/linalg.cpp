#include "qpt/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace qpt::linalg {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix partial_trace_second(const Matrix& m, int da, int db) {
  Matrix out = Matrix::Zero(da, da);
  for (int a = 0; a < da; ++a)
    for (int ap = 0; ap < da; ++ap)
      for (int b = 0; b < db; ++b) out(a, ap) += m(a * db + b, ap * db + b);
  return out;
}

Matrix partial_trace_first(const Matrix& m, int da, int db) {
  Matrix out = Matrix::Zero(db, db);
  for (int b = 0; b < db; ++b)
    for (int bp = 0; bp < db; ++bp)
      for (int a = 0; a < da; ++a) out(b, bp) += m(a * db + b, a * db + bp);
  return out;
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

HermitianEigen hermitian_eigen(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Matrix& m) { return hermitian_eigenvalues(hermitian_part(m)).minCoeff(); }

double trace_distance(const Matrix& a, const Matrix& b) {
  return 0.5 * hermitian_eigenvalues(hermitian_part(a - b)).cwiseAbs().sum();
}

Matrix psd_sqrt(const Matrix& m) {
  auto eig = hermitian_eigen(hermitian_part(m));
  RealVector s = eig.values.unaryExpr([](double x) { return std::sqrt(std::max(x, 0.0)); });
  return eig.vectors * s.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

double entropy_of_spectrum(const RealVector& eigenvalues, double floor) {
  double h = 0.0;
  for (double x : eigenvalues) {
    if (x > floor) h -= x * std::log2(x);
  }
  return h;
}

double von_neumann_entropy(const Matrix& rho, double floor) {
  return entropy_of_spectrum(hermitian_eigenvalues(hermitian_part(rho)), floor);
}

double shannon_entropy(const std::vector<double>& p, double floor) {
  double h = 0.0;
  for (double x : p) {
    if (x > floor) h -= x * std::log2(x);
  }
  return h;
}

Matrix projector(const Vector& v) { return v * v.adjoint(); }

}  // namespace qpt::linalg

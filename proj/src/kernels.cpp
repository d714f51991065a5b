#include "qpt/kernels.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qpt::kernels {

namespace {

// Per-entry routines shared by both variants, so they agree bit for bit.
// `vt` holds the vectors as columns for contiguous access.
inline double quadratic_form(const Matrix& vt, Eigen::Index j, const Matrix& rho) {
  return vt.col(j).dot(rho * vt.col(j)).real();
}

inline cplx operator_entry(const Matrix& vectors, const RealVector& weights, Eigen::Index a, Eigen::Index b) {
  return (vectors.col(a).array() * weights.array().cast<cplx>() * vectors.col(b).array().conjugate()).sum();
}

inline double ll_term(double f, double p, double floor) { return f == 0.0 ? 0.0 : f * std::log(std::max(p, floor)); }

}  // namespace

RealVector born_probabilities_serial(const Matrix& vectors, const Matrix& rho) {
  const Matrix vt = vectors.transpose();
  RealVector p(vectors.rows());
  for (Eigen::Index j = 0; j < vectors.rows(); ++j) p(j) = quadratic_form(vt, j, rho);
  return p;
}

RealVector born_probabilities(const Matrix& vectors, const Matrix& rho) {
  const Matrix vt = vectors.transpose();
  RealVector p(vectors.rows());
  const Eigen::Index rows = vectors.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < rows; ++j) p(j) = quadratic_form(vt, j, rho);
  return p;
}

// R is Hermitian: fill the lower triangle and mirror it.
Matrix accumulate_operator_serial(const Matrix& vectors, const RealVector& weights) {
  const Eigen::Index n = vectors.cols();
  Matrix r(n, n);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = b; a < n; ++a) r(a, b) = operator_entry(vectors, weights, a, b);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = 0; a < b; ++a) r(a, b) = std::conj(r(b, a));
  return r;
}

Matrix accumulate_operator(const Matrix& vectors, const RealVector& weights) {
  const Eigen::Index n = vectors.cols();
  Matrix r(n, n);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = b; a < n; ++a) r(a, b) = operator_entry(vectors, weights, a, b);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = 0; a < b; ++a) r(a, b) = std::conj(r(b, a));
  return r;
}

double log_likelihood_serial(const RealVector& freqs, const RealVector& probs, double floor) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < freqs.size(); ++j) total += ll_term(freqs(j), probs(j), floor);
  return total;
}

double log_likelihood(const RealVector& freqs, const RealVector& probs, double floor) {
  const Eigen::Index n = freqs.size();
  std::vector<double> terms(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) terms[static_cast<std::size_t>(j)] = ll_term(freqs(j), probs(j), floor);
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace qpt::kernels

#include <doctest.h>

#include <cmath>

#include "qpt/linalg.hpp"

using namespace qpt;

TEST_CASE("partial traces of a product state") {
  Matrix a(2, 2), b(3, 3);
  a << 0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.3;
  b = Matrix::Identity(3, 3) / 3.0;
  b(0, 1) = b(1, 0) = 0.05;
  const Matrix ab = linalg::kron(a, b);
  CHECK(linalg::max_abs(linalg::partial_trace_second(ab, 2, 3) - a) < 1e-14);
  CHECK(linalg::max_abs(linalg::partial_trace_first(ab, 2, 3) - b) < 1e-14);
}

TEST_CASE("entropies") {
  CHECK(linalg::von_neumann_entropy(Matrix::Identity(4, 4) / 4.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(linalg::shannon_entropy({0.5, 0.5, 0.0}) == doctest::Approx(1.0));
  // slightly negative eigenvalues must not poison the result
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0 + 1e-15;
  rho(1, 1) = -1e-15;
  CHECK(std::isfinite(linalg::von_neumann_entropy(rho)));
  CHECK(linalg::von_neumann_entropy(rho) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("trace distance of orthogonal pure states is one") {
  const Matrix p0 = linalg::projector(Vector::Unit(3, 0));
  const Matrix p2 = linalg::projector(Vector::Unit(3, 2));
  CHECK(linalg::trace_distance(p0, p2) == doctest::Approx(1.0));
  CHECK(linalg::trace_distance(p0, p0) == doctest::Approx(0.0));
}

TEST_CASE("psd square root squares back") {
  Matrix m(2, 2);
  m << 2.0, cplx(0.5, 0.5), cplx(0.5, -0.5), 1.0;
  const Matrix s = linalg::psd_sqrt(m);
  CHECK(linalg::max_abs(s * s - m) < 1e-12);
}

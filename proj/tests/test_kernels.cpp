#include <doctest.h>

#include <random>

#include "qpt/kernels.hpp"
#include "qpt/mub.hpp"
#include "qpt/tomo.hpp"

using namespace qpt;

namespace {

Matrix random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("parallel kernels reproduce the serial reference") {
  std::mt19937_64 rng(5);
  for (int d : {2, 3, 4, 5}) {
    CAPTURE(d);
    const Matrix v = tomography_vectors(generate_mubs(d));
    const Matrix rho = random_state(d * d, rng);

    const RealVector ps = kernels::born_probabilities_serial(v, rho);
    const RealVector pp = kernels::born_probabilities(v, rho);
    CHECK((ps - pp).cwiseAbs().maxCoeff() == 0.0);

    RealVector w = RealVector::Zero(v.rows());
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = (j % 7 == 0) ? 0.0 : u(rng);
    const Matrix rs = kernels::accumulate_operator_serial(v, w);
    const Matrix rp = kernels::accumulate_operator(v, w);
    CHECK(linalg::max_abs(rs - rp) == 0.0);

    CHECK(kernels::log_likelihood_serial(w, ps) == doctest::Approx(kernels::log_likelihood(w, pp)).epsilon(1e-14));
  }
}

TEST_CASE("Born probabilities match the trace form") {
  std::mt19937_64 rng(9);
  const Matrix v = tomography_vectors(generate_mubs(3));
  const Matrix rho = random_state(9, rng);
  const RealVector p = kernels::born_probabilities(v, rho);
  for (Eigen::Index j = 0; j < v.rows(); j += 17) {
    const Vector vj = v.row(j).transpose();
    CHECK(p(j) == doctest::Approx((linalg::projector(vj) * rho).trace().real()).epsilon(1e-12));
  }
}

TEST_CASE("operator accumulation of the full POVM is (d+1)^2 I") {
  for (int d : {2, 3, 5}) {
    const Matrix v = tomography_vectors(generate_mubs(d));
    const Matrix r = kernels::accumulate_operator(v, RealVector::Ones(v.rows()));
    CHECK(linalg::max_abs(r - (d + 1.0) * (d + 1.0) * Matrix::Identity(d * d, d * d)) < 1e-10);
  }
}

TEST_CASE("log-likelihood skips zero frequencies and clamps zero probabilities") {
  RealVector f(3), p(3);
  f << 0.0, 0.5, 0.5;
  p << 0.0, 0.5, 0.0;
  const double ll = kernels::log_likelihood_serial(f, p);
  CHECK(std::isfinite(ll));
  CHECK(ll == doctest::Approx(0.5 * std::log(0.5) + 0.5 * std::log(1e-300)));
}

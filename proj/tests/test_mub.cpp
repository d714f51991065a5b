#include <doctest.h>

#include <cmath>

#include "qpt/error.hpp"
#include "qpt/mub.hpp"

using namespace qpt;

namespace {

// Overlap matrix built straight from the amplitudes, independent of
// verify_mubs.
double max_cross_overlap_error(const MubFamily& f) {
  const int d = f.dim();
  double worst = 0.0;
  for (int a = 1; a <= d + 1; ++a)
    for (int b = a + 1; b <= d + 1; ++b)
      for (int m = 1; m <= d; ++m)
        for (int n = 1; n <= d; ++n) {
          cplx ip = 0.0;
          for (int k = 0; k < d; ++k) ip += std::conj(f.state(a, m).amplitudes(k)) * f.state(b, n).amplitudes(k);
          worst = std::max(worst, std::abs(std::norm(ip) - 1.0 / d));
        }
  return worst;
}

}  // namespace

TEST_CASE("d = 2 family: computational, Fourier, circular") {
  const MubFamily f = generate_mubs(2);
  CHECK(f.num_bases() == 3);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(f.state(2, 1).amplitudes(0) - s) < 1e-15);
  CHECK(std::abs(f.state(2, 1).amplitudes(1) - s) < 1e-15);
  CHECK(std::abs(f.state(2, 2).amplitudes(0) - s) < 1e-15);
  CHECK(std::abs(f.state(2, 2).amplitudes(1) + s) < 1e-15);
}

TEST_CASE("second basis is the discrete Fourier basis for prime d") {
  for (int d : {3, 5, 7}) {
    const MubFamily f = generate_mubs(d);
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j) {
        const cplx expected = std::polar(1.0 / std::sqrt(double(d)), 2.0 * M_PI * k * j / d);
        CHECK(std::abs(f.state(2, k + 1).amplitudes(j) - expected) < 1e-12);
      }
  }
}

TEST_CASE("generated families are unbiased") {
  for (int d : {2, 3, 4, 5, 7}) {
    CAPTURE(d);
    const MubFamily f = generate_mubs(d);
    CHECK(f.num_bases() == d + 1);
    CHECK(max_cross_overlap_error(f) < 1e-10);
    const MubReport r = verify_mubs(f);
    CHECK(r.ok());
    CHECK(r.orthonormality < 1e-10);
    CHECK(r.completeness < 1e-10);
  }
}

TEST_CASE("global phase convention: first nonzero amplitude real positive") {
  for (int d : {2, 3, 4, 5}) {
    const MubFamily f = generate_mubs(d);
    for (const auto& basis : f.bases())
      for (const auto& s : basis) {
        Eigen::Index i = 0;
        while (std::abs(s.amplitudes(i)) < 1e-12) ++i;
        CHECK(s.amplitudes(i).imag() == doctest::Approx(0.0));
        CHECK(s.amplitudes(i).real() > 0.0);
      }
  }
}

TEST_CASE("unsupported dimensions") {
  CHECK_THROWS_AS(generate_mubs(6), Error);
  try {
    generate_mubs(8);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnsupportedDimension);
  }
  CHECK_THROWS_AS(generate_mubs(1), Error);
}

TEST_CASE("projectors") {
  const MubFamily f = generate_mubs(2);
  Matrix p11 = projector(f, 1, 1);
  CHECK(linalg::max_abs(p11 - linalg::projector(Vector::Unit(2, 0))) < 1e-15);
  CHECK(linalg::max_abs(projector(f, 2, 1) - Matrix::Constant(2, 2, 0.5)) < 1e-15);
  CHECK((projector(f, 1, 1) * projector(f, 2, 1)).trace().real() == doctest::Approx(0.5));
  try {
    projector(f, 4, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IndexOutOfRange);
  }
  CHECK_THROWS_AS(projector(f, 1, 0), Error);
}

TEST_CASE("projector properties for every generated state") {
  for (int d : {2, 3, 4, 5}) {
    const MubFamily f = generate_mubs(d);
    Matrix sum = Matrix::Zero(d, d);
    for (int a = 1; a <= d + 1; ++a)
      for (int m = 1; m <= d; ++m) {
        const Matrix p = projector(f, a, m);
        CHECK(linalg::max_abs(p * p - p) < 1e-12);
        CHECK(linalg::max_abs(p - p.adjoint()) < 1e-15);
        CHECK(p.trace().real() == doctest::Approx(1.0));
        sum += p;
      }
    CHECK(linalg::max_abs(sum - (d + 1.0) * Matrix::Identity(d, d)) < 1e-10);
  }
}

TEST_CASE("verify_mubs flags constructed violations") {
  const MubFamily good = generate_mubs(3);

  auto bases = good.bases();
  bases[1][0].amplitudes *= 1.01;
  const MubReport scaled = verify_mubs(MubFamily(3, bases));
  CHECK_FALSE(scaled.orthonormal_ok());
  CHECK_FALSE(scaled.ok());

  for (int d : {2, 3, 5}) {
    auto dup = generate_mubs(d).bases();
    dup[1] = dup[0];
    const MubReport r = verify_mubs(MubFamily(d, dup));
    CHECK(r.unbiasedness == doctest::Approx(1.0 - 1.0 / d).epsilon(1e-12));
    CHECK_FALSE(r.unbiased_ok());
  }
}

TEST_CASE("OAM display labels") {
  const MubFamily f4 = generate_mubs(4);
  CHECK(f4.oam_label(1) == -2);
  CHECK(f4.oam_label(2) == -1);
  CHECK(f4.oam_label(3) == 1);
  CHECK(f4.oam_label(4) == 2);
  const MubFamily f3 = generate_mubs(3);
  CHECK(f3.oam_label(1) == -1);
  CHECK(f3.oam_label(2) == 0);
  CHECK(f3.oam_label(3) == 1);
}

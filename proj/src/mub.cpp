#include "qpt/mub.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "qpt/error.hpp"

namespace qpt {

namespace {

void fix_global_phase(Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > 1e-12) {
      v *= std::conj(v(i)) / mag;
      v(i) = mag;
      return;
    }
  }
}

std::vector<PureState> computational_basis(int d) {
  std::vector<PureState> basis;
  for (int m = 0; m < d; ++m) basis.push_back({Vector::Unit(d, m)});
  return basis;
}

std::vector<PureState> from_columns(const Matrix& cols) {
  std::vector<PureState> basis;
  for (Eigen::Index c = 0; c < cols.cols(); ++c) {
    Vector v = cols.col(c);
    v.normalize();
    fix_global_phase(v);
    basis.push_back({v});
  }
  return basis;
}

// Quadratic-phase bases ω^(k j² + m j)/√d, k = 0..d-1. k = 0 is the DFT.
std::vector<std::vector<PureState>> prime_mubs(int d) {
  std::vector<std::vector<PureState>> bases{computational_basis(d)};
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    Matrix cols(d, d);
    for (int j = 0; j < d; ++j) {
      for (int m = 0; m < d; ++m) {
        double phase = 0.0;
        if (d == 2) {
          // i^(k j²) (-1)^(m j)
          phase = std::numbers::pi * (0.5 * k * j * j + m * j);
        } else {
          const long e = (static_cast<long>(k) * j * j + static_cast<long>(m) * j) % d;
          phase = 2.0 * std::numbers::pi * static_cast<double>(e) / d;
        }
        cols(j, m) = norm * std::polar(1.0, phase);
      }
    }
    bases.push_back(from_columns(cols));
  }
  return bases;
}

// d = 4 via GF(4): joint eigenbases of the five maximal commuting classes of
// two-qubit Paulis {ZI,IZ}, {XI,IX}, {YI,IY}, {XZ,ZY}, {ZX,YZ}.
std::vector<std::vector<PureState>> gf4_mubs() {
  Matrix id = Matrix::Identity(2, 2);
  Matrix x(2, 2), z(2, 2), y(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  y << 0, cplx(0, -1), cplx(0, 1), 0;
  auto pair = [](const Matrix& a, const Matrix& b) { return linalg::kron(a, b); };

  std::vector<std::vector<PureState>> bases{computational_basis(4)};

  Matrix wh(4, 4);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) wh(j, k) = (std::popcount(static_cast<unsigned>(j & k)) % 2 ? -0.5 : 0.5);
  bases.push_back(from_columns(wh));

  const std::vector<std::pair<Matrix, Matrix>> classes{
      {pair(y, id), pair(id, y)},
      {pair(x, z), pair(z, y)},
      {pair(z, x), pair(y, z)},
  };
  for (const auto& [p, q] : classes) {
    // Joint eigenvalues (±1, ±1) map to distinct eigenvalues of p + 2q.
    Matrix h = p + 2.0 * q;
    bases.push_back(from_columns(linalg::hermitian_eigen(h).vectors));
  }
  return bases;
}

}  // namespace

bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

MubFamily::MubFamily(int dim, std::vector<std::vector<PureState>> bases) : dim_(dim), bases_(std::move(bases)) {
  if (dim_ < 2) throw Error(Errc::UnsupportedDimension, "dimension must be at least 2");
  if (bases_.size() != static_cast<std::size_t>(dim_ + 1))
    throw Error(Errc::DimensionMismatch, "expected d+1 bases");
  for (const auto& b : bases_) {
    if (b.size() != static_cast<std::size_t>(dim_)) throw Error(Errc::DimensionMismatch, "expected d states per basis");
    for (const auto& s : b)
      if (s.dim() != dim_) throw Error(Errc::DimensionMismatch, "state dimension differs from family dimension");
  }
}

void MubFamily::check_index(int alpha, int m) const {
  if (alpha < 1 || alpha > num_bases() || m < 1 || m > dim_)
    throw Error(Errc::IndexOutOfRange, "basis " + std::to_string(alpha) + ", state " + std::to_string(m));
}

const PureState& MubFamily::state(int alpha, int m) const {
  check_index(alpha, m);
  return bases_[alpha - 1][m - 1];
}

const std::vector<PureState>& MubFamily::basis(int alpha) const {
  check_index(alpha, 1);
  return bases_[alpha - 1];
}

int MubFamily::oam_label(int m) const {
  check_index(1, m);
  const int idx = m - 1;
  if (dim_ % 2 == 1) return idx - (dim_ - 1) / 2;
  return idx < dim_ / 2 ? idx - dim_ / 2 : idx - dim_ / 2 + 1;
}

MubFamily generate_mubs(int d) {
  if (d == 4) return MubFamily(4, gf4_mubs());
  if (!is_prime(d))
    throw Error(Errc::UnsupportedDimension, "no MUB construction for d = " + std::to_string(d));
  return MubFamily(d, prime_mubs(d));
}

Matrix projector(const MubFamily& family, int alpha, int m) {
  return linalg::projector(family.state(alpha, m).amplitudes);
}

MubReport verify_mubs(const MubFamily& family, double tolerance) {
  MubReport report;
  report.tolerance = tolerance;
  const int d = family.dim();
  const int nb = family.num_bases();
  Matrix sum = Matrix::Zero(d, d);
  for (int a = 1; a <= nb; ++a) {
    for (int m = 1; m <= d; ++m) {
      const Vector& u = family.state(a, m).amplitudes;
      sum += linalg::projector(u);
      for (int b = a; b <= nb; ++b) {
        for (int n = 1; n <= d; ++n) {
          const double overlap = std::norm(u.dot(family.state(b, n).amplitudes));
          if (a == b) {
            report.orthonormality = std::max(report.orthonormality, std::abs(overlap - (m == n ? 1.0 : 0.0)));
          } else {
            report.unbiasedness = std::max(report.unbiasedness, std::abs(overlap - 1.0 / d));
          }
        }
      }
    }
  }
  report.completeness = linalg::max_abs(sum / static_cast<double>(nb) - Matrix::Identity(d, d));
  return report;
}

}  // namespace qpt

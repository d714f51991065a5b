#include "qpt/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qpt/error.hpp"

namespace qpt {

namespace {

// Column m holds (I ⊗ A_m)|Φ>, orthonormal for any basis with
// Tr(A_m^† A_n) = d δ_mn.
Matrix basis_vectors(const OperatorBasis& basis) {
  const int d = basis.dim;
  Matrix cols(d * d, static_cast<Eigen::Index>(basis.operators.size()));
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t m = 0; m < basis.operators.size(); ++m)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) cols(a * d + b, static_cast<Eigen::Index>(m)) = s * basis.operators[m](b, a);
  return cols;
}

void check_density_dim(const Matrix& rho, int d) {
  if (rho.rows() != d || rho.cols() != d)
    throw Error(Errc::DimensionMismatch,
                "expected " + std::to_string(d) + "x" + std::to_string(d) + " input, got " +
                    std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()));
}

KrausSet diagonal_kraus(int d, const std::map<int, double>& weights, const OperatorBasis& basis) {
  KrausSet k{d, {}};
  for (const auto& [m, w] : weights)
    if (w > 0.0) k.operators.push_back(std::sqrt(w) * basis.operators[static_cast<std::size_t>(m)]);
  return k;
}

}  // namespace

std::shared_ptr<const OperatorBasis> weyl_basis(int d) {
  if (d < 2) throw Error(Errc::UnsupportedDimension, "dimension must be at least 2");
  Matrix x = Matrix::Zero(d, d);
  Matrix z = Matrix::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    x((n + 1) % d, n) = 1.0;
    z(n, n) = std::polar(1.0, 2.0 * std::numbers::pi * n / d);
  }
  auto basis = std::make_shared<OperatorBasis>();
  basis->dim = d;
  basis->name = "weyl";
  Matrix xj = Matrix::Identity(d, d);
  for (int j = 0; j < d; ++j) {
    Matrix zk = Matrix::Identity(d, d);
    for (int k = 0; k < d; ++k) {
      basis->operators.push_back(xj * zk);
      zk = zk * z;
    }
    xj = xj * x;
  }
  return basis;
}

Channel::Channel(ChoiMatrix choi, std::string label, std::optional<KrausSet> kraus)
    : choi_(std::move(choi)), kraus_(std::move(kraus)), label_(std::move(label)) {
  const Eigen::Index n = static_cast<Eigen::Index>(choi_.dim) * choi_.dim;
  if (choi_.dim < 2 || choi_.matrix.rows() != n || choi_.matrix.cols() != n)
    throw Error(Errc::DimensionMismatch, "Choi matrix must be d^2 x d^2");
  if (kraus_ && kraus_->dim != choi_.dim) throw Error(Errc::DimensionMismatch, "Kraus dimension differs from Choi");
}

ProcessMatrix Channel::chi(std::shared_ptr<const OperatorBasis> basis) const {
  if (!basis) basis = weyl_basis(dim());
  return choi_to_chi(choi_, std::move(basis));
}

ChoiMatrix kraus_to_choi(const KrausSet& k) {
  const int d = k.dim;
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  Matrix rho = Matrix::Zero(d * d, d * d);
  for (const auto& op : k.operators) {
    if (op.rows() != d || op.cols() != d) throw Error(Errc::DimensionMismatch, "Kraus operator has wrong shape");
    Vector v(d * d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) v(a * d + b) = s * op(b, a);
    rho += v * v.adjoint();
  }
  return {d, rho};
}

ProcessMatrix choi_to_chi(const ChoiMatrix& c, std::shared_ptr<const OperatorBasis> basis) {
  if (!basis || basis->dim != c.dim) throw Error(Errc::DimensionMismatch, "operator basis dimension differs from Choi");
  Matrix b = basis_vectors(*basis);
  return {c.dim, basis, b.adjoint() * c.matrix * b};
}

ChoiMatrix chi_to_choi(const ProcessMatrix& p) {
  if (!p.basis || p.basis->dim != p.dim) throw Error(Errc::DimensionMismatch, "process matrix without matching basis");
  Matrix b = basis_vectors(*p.basis);
  return {p.dim, b * p.matrix * b.adjoint()};
}

KrausSet choi_to_kraus(const ChoiMatrix& c) {
  const int d = c.dim;
  auto eig = linalg::hermitian_eigen(linalg::hermitian_part(c.matrix));
  if (eig.values.minCoeff() < -1e-8)
    throw Error(Errc::NotPositive, "Choi eigenvalue " + std::to_string(eig.values.minCoeff()));
  KrausSet k{d, {}};
  for (Eigen::Index i = eig.values.size() - 1; i >= 0; --i) {
    const double lambda = eig.values(i);
    if (lambda < 1e-12) continue;
    Matrix op(d, d);
    const double s = std::sqrt(d * lambda);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) op(b, a) = s * eig.vectors(a * d + b, i);
    Eigen::Index r = 0, col = 0;
    op.cwiseAbs().maxCoeff(&r, &col);
    const cplx pivot = op(r, col);
    op *= std::conj(pivot) / std::abs(pivot);
    k.operators.push_back(std::move(op));
  }
  return k;
}

Matrix apply(const ChoiMatrix& choi, const Matrix& rho_in) {
  const int d = choi.dim;
  check_density_dim(rho_in, d);
  Matrix out = Matrix::Zero(d, d);
  for (int b = 0; b < d; ++b)
    for (int bp = 0; bp < d; ++bp) {
      cplx acc = 0.0;
      for (int ap = 0; ap < d; ++ap)
        for (int a = 0; a < d; ++a) acc += rho_in(ap, a) * choi.matrix(ap * d + b, a * d + bp);
      out(b, bp) = static_cast<double>(d) * acc;
    }
  return out;
}

Matrix apply(const Channel& channel, const Matrix& rho_in) { return apply(channel.choi(), rho_in); }

Matrix apply(const KrausSet& kraus, const Matrix& rho_in) {
  check_density_dim(rho_in, kraus.dim);
  Matrix out = Matrix::Zero(kraus.dim, kraus.dim);
  for (const auto& k : kraus.operators) out += k * rho_in * k.adjoint();
  return out;
}

Matrix maximally_entangled(int d) {
  Vector phi = Vector::Zero(d * d);
  for (int i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return phi * phi.adjoint();
}

Channel identity_channel(int d) {
  if (d < 2) throw Error(Errc::UnsupportedDimension, "dimension must be at least 2");
  KrausSet k{d, {Matrix::Identity(d, d)}};
  return Channel(ChoiMatrix{d, maximally_entangled(d)}, "identity", k);
}

std::map<int, double> symmetric_chi_weights(int d, double fidelity) {
  std::map<int, double> w;
  w[0] = ((d + 1) * fidelity - 1.0) / d;
  const double rest = (1.0 - fidelity) / (static_cast<double>(d) * (d - 1));
  for (int m = 1; m < d * d; ++m) w[m] = rest;
  return w;
}

Channel depolarizing_with_fidelity(int d, double fidelity) {
  if (d < 2) throw Error(Errc::UnsupportedDimension, "dimension must be at least 2");
  if (!(fidelity >= 1.0 / d - 1e-12 && fidelity <= 1.0 + 1e-12))
    throw Error(Errc::FidelityOutOfRange, "F = " + std::to_string(fidelity) + " outside [1/d, 1]");
  fidelity = std::clamp(fidelity, 1.0 / d, 1.0);
  Channel base = diagonal_chi_channel(d, symmetric_chi_weights(d, fidelity));
  return Channel(base.choi(), "depolarizing(F=" + std::to_string(fidelity) + ")", base.kraus());
}

double cloning_fidelity(int d) { return 0.5 + 1.0 / (1.0 + d); }

double intercept_resend_fidelity(int d) { return 2.0 / (1.0 + d); }

Channel optimal_cloning_channel(int d) {
  Channel dep = depolarizing_with_fidelity(d, cloning_fidelity(d));
  return Channel(dep.choi(), "optimal_cloning", dep.kraus());
}

Channel intercept_resend_channel(const MubFamily& mubs, const std::vector<int>& bases) {
  if (bases.empty()) throw Error(Errc::EmptySubset, "intercept-resend needs at least one basis");
  std::set<int> unique(bases.begin(), bases.end());
  const int d = mubs.dim();
  KrausSet k{d, {}};
  const double s = 1.0 / std::sqrt(static_cast<double>(unique.size()));
  std::string label = "intercept_resend(";
  for (int alpha : unique) {
    if (alpha < 1 || alpha > mubs.num_bases())
      throw Error(Errc::IndexOutOfRange, "basis " + std::to_string(alpha));
    for (int m = 1; m <= d; ++m) k.operators.push_back(s * projector(mubs, alpha, m));
    label += std::to_string(alpha) + (alpha == *unique.rbegin() ? ")" : ",");
  }
  return Channel(kraus_to_choi(k), label, k);
}

Channel diagonal_chi_channel(int d, const std::map<int, double>& weights) {
  auto basis = weyl_basis(d);
  double total = 0.0;
  for (const auto& [m, w] : weights) {
    if (m < 0 || m >= d * d) throw Error(Errc::IndexOutOfRange, "Weyl index " + std::to_string(m));
    if (w < 0.0) throw Error(Errc::WeightsNotNormalized, "negative weight at index " + std::to_string(m));
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(Errc::WeightsNotNormalized, "weights sum to " + std::to_string(total));
  ProcessMatrix chi{d, basis, Matrix::Zero(d * d, d * d)};
  for (const auto& [m, w] : weights) chi.matrix(m, m) = w;
  return Channel(chi_to_choi(chi), "diagonal_chi", diagonal_kraus(d, weights, *basis));
}

ChannelReport validate_channel(const ChoiMatrix& c) {
  const int d = c.dim;
  ChannelReport r;
  r.min_choi_eigenvalue = linalg::min_eigenvalue(c.matrix);
  Matrix marginal = linalg::partial_trace_second(c.matrix, d, d) * static_cast<double>(d);
  r.tp_deviation = linalg::max_abs(marginal - Matrix::Identity(d, d));
  return r;
}

ChannelReport validate_channel(const Channel& c) { return validate_channel(c.choi()); }

}  // namespace qpt

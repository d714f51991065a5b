#include "qpt/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>

#include "qpt/error.hpp"
#include "qpt/metrics.hpp"
#include "qpt/tomo.hpp"

namespace qpt {

namespace {

constexpr double kEntropyFloor = 1e-14;

int bipartite_dim(const Matrix& rho_ab) {
  const auto n = rho_ab.rows();
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (rho_ab.cols() != n || static_cast<Eigen::Index>(d) * d != n || d < 2)
    throw Error(Errc::NotAState, "ρ_AB must be a d^2 x d^2 matrix");
  return d;
}

void check_state(const Matrix& rho) {
  if (linalg::max_abs(rho - rho.adjoint()) > 1e-8) throw Error(Errc::NotAState, "not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-8) throw Error(Errc::NotAState, "trace differs from 1");
  const double lo = linalg::min_eigenvalue(rho);
  if (lo < -1e-8) throw Error(Errc::NotAState, "negative eigenvalue " + std::to_string(lo));
}

double classical_conditional_entropy(const Matrix& rho_ab, const PovmSet& za, const PovmSet& zb) {
  std::vector<double> joint;
  std::vector<double> marginal_b(zb.elements.size(), 0.0);
  for (const auto& a : za.elements)
    for (std::size_t k = 0; k < zb.elements.size(); ++k) {
      const double p = std::max(0.0, (linalg::kron(a, zb.elements[k]) * rho_ab).trace().real());
      joint.push_back(p);
      marginal_b[k] += p;
    }
  return linalg::shannon_entropy(joint, kEntropyFloor) - linalg::shannon_entropy(marginal_b, kEntropyFloor);
}

}  // namespace

double eve_conditional_entropy(const Purification& pur, int d, const PovmSet& za) {
  const int r = pur.ancilla_dim;
  // Block M_b(a, e) = ψ(a, b, e), system index a*d + b.
  std::vector<Matrix> blocks(static_cast<std::size_t>(d), Matrix(d, r));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int e = 0; e < r; ++e) blocks[static_cast<std::size_t>(b)](a, e) = pur.state((a * d + b) * r + e);

  Matrix rho_e = Matrix::Zero(r, r);
  for (const auto& m : blocks) rho_e += m.transpose() * m.conjugate();

  double h_ze = 0.0;
  for (const auto& z : za.elements) {
    // Tr_A[(Z ⊗ I) ρ_AE] up to complex conjugation, which keeps the spectrum.
    Matrix sigma = Matrix::Zero(r, r);
    for (const auto& m : blocks) sigma += m.adjoint() * z * m;
    h_ze += linalg::von_neumann_entropy(sigma, kEntropyFloor);
  }
  return h_ze - linalg::von_neumann_entropy(rho_e, kEntropyFloor);
}


double shannon_entropy_d(double x, int d) {
  if (d < 2) throw Error(Errc::OutOfRange, "dimension must be at least 2");
  if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) throw Error(Errc::OutOfRange, "argument " + std::to_string(x));
  x = std::clamp(x, 0.0, 1.0);
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x / (d - 1));
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

double bb84_rate(int d, double q) { return std::log2(static_cast<double>(d)) - 2.0 * shannon_entropy_d(q, d); }

double mub_full_rate(int d, double q) {
  if (d < 2) throw Error(Errc::OutOfRange, "dimension must be at least 2");
  const double x = (d + 1.0) / d * q;
  if (!(q >= -1e-12 && x <= 1.0 + 1e-12))
    throw Error(Errc::OutOfRange, "Q = " + std::to_string(q) + " outside [0, d/(d+1)]");
  const double xc = std::clamp(x, 0.0, 1.0);
  return std::log2(static_cast<double>(d)) - shannon_entropy_d(xc, d) - xc * std::log2(d + 1.0);
}

std::string to_string(Detection d) { return d == Detection::Sort ? "sort" : "filter"; }

Detection detection_from_string(const std::string& s) {
  if (s == "sort") return Detection::Sort;
  if (s == "filter") return Detection::Filter;
  throw Error(Errc::PovmInvalid, "unknown detection '" + s + "'");
}

PovmSet PovmSet::sort(int d) {
  PovmSet p{d, Detection::Sort, 0, {}};
  for (int k = 0; k < d; ++k) p.elements.push_back(linalg::projector(Vector::Unit(d, k)));
  return p;
}

PovmSet PovmSet::filter(int d, int index) {
  if (index < 0 || index >= d) throw Error(Errc::IndexOutOfRange, "filter outcome " + std::to_string(index));
  return {d, Detection::Filter, index, {linalg::projector(Vector::Unit(d, index))}};
}

void validate_povm(const PovmSet& povm) {
  const int d = povm.dim;
  if (povm.elements.empty()) throw Error(Errc::PovmInvalid, "no elements");
  for (const auto& e : povm.elements) {
    if (e.rows() != d || e.cols() != d) throw Error(Errc::PovmInvalid, "element has wrong shape");
    if (linalg::min_eigenvalue(e) < -1e-10) throw Error(Errc::PovmInvalid, "element not positive");
  }
  if (povm.kind == Detection::Sort) {
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& e : povm.elements) sum += e;
    if (linalg::max_abs(sum - Matrix::Identity(d, d)) > 1e-10) throw Error(Errc::PovmInvalid, "elements do not sum to I");
  } else {
    const Matrix& e = povm.elements.front();
    if (povm.elements.size() != 1 || linalg::max_abs(e * e - e) > 1e-10 || std::abs(e.trace().real() - 1.0) > 1e-10)
      throw Error(Errc::PovmInvalid, "filter must be a single rank-1 projector");
  }
}

Matrix choi_to_rho_ab(const Channel& channel) { return channel.choi().matrix; }

Purification purify(const Matrix& rho, double cutoff) {
  const auto eig = linalg::hermitian_eigen(linalg::hermitian_part(rho));
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = eig.values.size() - 1; i >= 0; --i)
    if (eig.values(i) > cutoff) kept.push_back(i);
  const int n = static_cast<int>(rho.rows());
  const int r = std::max<int>(1, static_cast<int>(kept.size()));
  Purification p{n, r, Vector::Zero(static_cast<Eigen::Index>(n) * r)};
  for (int k = 0; k < static_cast<int>(kept.size()); ++k) {
    const double s = std::sqrt(eig.values(kept[static_cast<std::size_t>(k)]));
    for (int i = 0; i < n; ++i) p.state(i * r + k) = s * eig.vectors(i, kept[static_cast<std::size_t>(k)]);
  }
  return p;
}

DevetakWinterTerms devetak_winter_terms(const Matrix& rho_ab, const PovmSet& za, const PovmSet& zb) {
  const int d = bipartite_dim(rho_ab);
  check_state(rho_ab);
  if (za.dim != d || zb.dim != d) throw Error(Errc::PovmInvalid, "POVM dimension differs from state");
  if (za.kind != Detection::Sort) throw Error(Errc::PovmInvalid, "Z_A must be a sort-type POVM");
  validate_povm(za);
  validate_povm(zb);
  const PovmSet bob = zb.kind == Detection::Filter ? PovmSet::sort(d) : zb;

  DevetakWinterTerms t;
  t.h_za_given_e = eve_conditional_entropy(purify(rho_ab), d, za);
  t.h_za_given_zb = classical_conditional_entropy(rho_ab, za, bob);
  t.key_rate = t.h_za_given_e - t.h_za_given_zb;
  if (zb.kind == Detection::Filter) t.key_rate /= d;
  return t;
}

double devetak_winter_rate(const Matrix& rho_ab, const PovmSet& za, const PovmSet& zb) {
  return devetak_winter_terms(rho_ab, za, zb).key_rate;
}

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Bb84: return "bb84";
    case Protocol::MubFull: return "mub_full";
    case Protocol::DevetakWinter: return "devetak_winter";
  }
  return "unknown";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "bb84") return Protocol::Bb84;
  if (s == "mub_full" || s == "mub_full_analytic") return Protocol::MubFull;
  if (s == "devetak_winter" || s == "dw") return Protocol::DevetakWinter;
  throw Error(Errc::InvalidModel, "unknown protocol '" + s + "'");
}

std::vector<KeyRateReport> key_rates(const Channel& channel, const MubFamily& mubs,
                                     const std::vector<Protocol>& protocols, Detection detection) {
  const int d = channel.dim();
  const std::vector<int> all = all_bases(d);
  const ProbabilityTable table = forward_probabilities(channel, mubs, all, all);
  const double efficiency = detection == Detection::Filter ? 1.0 / d : 1.0;
  std::vector<KeyRateReport> out;
  for (Protocol p : protocols) {
    KeyRateReport r;
    r.protocol = p;
    r.dim = d;
    r.detection = detection;
    r.efficiency = efficiency;
    switch (p) {
      case Protocol::Bb84:
        r.q = error_rate(table, {1, 2});
        r.key_rate = bb84_rate(d, *r.q);
        break;
      case Protocol::MubFull:
        r.q = error_rate(table, all);
        if (*r.q <= d / (d + 1.0) + 1e-12) r.key_rate = mub_full_rate(d, *r.q);
        break;
      case Protocol::DevetakWinter:
        r.key_rate = devetak_winter_rate(choi_to_rho_ab(channel), PovmSet::sort(d), PovmSet::sort(d));
        break;
    }
    if (r.key_rate) *r.key_rate *= efficiency;
    out.push_back(r);
  }
  return out;
}

NoiseModel rank_noise_model(int d, std::vector<int> indices) {
  if (indices.empty()) throw Error(Errc::EmptySubset, "noise model needs at least one Weyl index");
  std::set<int> unique(indices.begin(), indices.end());
  for (int i : unique)
    if (i < 1 || i >= d * d) throw Error(Errc::IndexOutOfRange, "Weyl index " + std::to_string(i));
  const double count = static_cast<double>(unique.size());
  return {"rank-" + std::to_string(unique.size() + 1), d, [unique, count](double f) {
            std::map<int, double> w{{0, f}};
            for (int i : unique) w[i] = (1.0 - f) / count;
            return w;
          }};
}

NoiseModel symmetric_noise_model(int d) {
  return {"rank-" + std::to_string(d * d), d, [d](double f) {
            if (f < 1.0 / (d + 1) - 1e-12 || f > 1.0 + 1e-12)
              throw Error(Errc::FidelityOutOfRange, "F = " + std::to_string(f));
            return symmetric_chi_weights(d, f);
          }};
}

std::vector<std::vector<int>> asymmetric_model_indices(int d) {
  auto range = [](int lo, int hi) {
    std::vector<int> v;
    for (int i = lo; i <= hi; ++i) v.push_back(i);
    return v;
  };
  switch (d) {
    case 2:
      return {{1, 2}, {1}};
    case 3:
      return {range(1, 6), range(1, 3), {1, 8}};
    case 4:
      return {range(1, 12), range(1, 6), {1, 12}};
    case 5:
      return {range(1, 10), range(21, 24)};
    default:
      return {};
  }
}

std::vector<SweepRow> sweep_noise_model(const NoiseModel& model, const std::vector<double>& fidelity_grid,
                                        const MubFamily& mubs, const std::vector<Protocol>& protocols,
                                        Detection detection) {
  if (fidelity_grid.empty()) throw Error(Errc::OutOfRange, "empty fidelity grid");
  if (model.dim != mubs.dim()) throw Error(Errc::DimensionMismatch, "model and MUB dimensions differ");
  std::vector<SweepRow> rows(fidelity_grid.size());
  std::vector<std::exception_ptr> errors(fidelity_grid.size());
  const auto n = static_cast<std::ptrdiff_t>(fidelity_grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      const double f = fidelity_grid[u];
      const Channel ch = diagonal_chi_channel(model.dim, model.weights(f));
      SweepRow row;
      row.fidelity = f;
      const std::vector<int> all = all_bases(model.dim);
      const ProbabilityTable table = forward_probabilities(ch, mubs, all, all);
      row.q_full = error_rate(table, all);
      row.q_bb84 = error_rate(table, {1, 2});
      for (const auto& r : key_rates(ch, mubs, protocols, detection)) {
        if (r.protocol == Protocol::Bb84) row.k_bb84 = r.key_rate;
        if (r.protocol == Protocol::MubFull) row.k_mub = r.key_rate;
        if (r.protocol == Protocol::DevetakWinter) row.k_dw = r.key_rate;
      }
      rows[u] = row;
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

}  // namespace qpt

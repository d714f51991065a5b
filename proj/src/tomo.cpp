#include "qpt/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qpt/error.hpp"
#include "qpt/kernels.hpp"

namespace qpt {

namespace {

constexpr double kProbabilityFloor = 1e-300;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Round-off can leave probabilities slightly outside [0, 1].
double clean_probability(double p) { return std::clamp(std::abs(p) < 1e-15 ? 0.0 : p, 0.0, 1.0); }

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

void check_bases(const std::vector<int>& bases, int d) {
  if (bases.empty()) throw Error(Errc::EmptySubset, "no bases given");
  for (int b : bases)
    if (b < 1 || b > d + 1) throw Error(Errc::IndexOutOfRange, "basis " + std::to_string(b));
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Vector setting_vector(const MubFamily& mubs, int alpha, int m, int beta, int n) {
  return linalg::kron(Vector(mubs.state(alpha, m).amplitudes.conjugate()), mubs.state(beta, n).amplitudes);
}

RealVector probabilities(const Matrix& vectors, const Matrix& rho, int d, bool parallel) {
  RealVector p = parallel ? kernels::born_probabilities(vectors, rho) : kernels::born_probabilities_serial(vectors, rho);
  return p * static_cast<double>(d);
}

// Settings with nonzero frequency; zero-frequency settings drop out of both
// the likelihood and R.
struct CompactData {
  Matrix vectors;
  RealVector freqs;
};

CompactData compact(const TomographyData& data, const MubFamily& mubs) {
  const std::vector<double> f = group_frequencies(data);
  const Matrix all = tomography_vectors(mubs);
  std::vector<Eigen::Index> rows;
  for (std::size_t j = 0; j < f.size(); ++j)
    if (f[j] > 0.0) rows.push_back(static_cast<Eigen::Index>(j));
  CompactData c{Matrix(static_cast<Eigen::Index>(rows.size()), all.cols()),
                RealVector(static_cast<Eigen::Index>(rows.size()))};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    c.vectors.row(static_cast<Eigen::Index>(i)) = all.row(rows[i]);
    c.freqs(static_cast<Eigen::Index>(i)) = f[static_cast<std::size_t>(rows[i])];
  }
  return c;
}

Matrix r_operator(const CompactData& c, const RealVector& p, bool parallel) {
  RealVector w(p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) w(j) = c.freqs(j) / std::max(p(j), kProbabilityFloor);
  return parallel ? kernels::accumulate_operator(c.vectors, w) : kernels::accumulate_operator_serial(c.vectors, w);
}

Matrix normalized(const Matrix& m) {
  Matrix h = linalg::hermitian_part(m);
  return h / h.trace().real();
}

// Euclidean projection onto the probability simplex.
RealVector project_simplex(const RealVector& y) {
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.rbegin(), u.rend());
  double sum = 0.0, shift = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sum += u[i];
    const double t = (sum - 1.0) / static_cast<double>(i + 1);
    if (u[i] > t) shift = t;
  }
  return (y.array() - shift).max(0.0);
}

// Nearest unit-trace PSD matrix in Frobenius norm.
Matrix project_state(const Matrix& m) {
  const auto e = linalg::hermitian_eigen(linalg::hermitian_part(m));
  return e.vectors * project_simplex(e.values).asDiagonal() * e.vectors.adjoint();
}

struct Candidate {
  Matrix rho;
  RealVector p;
  double log_likelihood = -std::numeric_limits<double>::infinity();
};

// A zero probability on an observed outcome means log L = -inf; the floor
// only protects the logarithm.
bool supports_data(const RealVector& p) { return p.allFinite() && p.minCoeff() > 0.0; }

}  // namespace

std::vector<int> all_bases(int d) {
  std::vector<int> b(static_cast<std::size_t>(d + 1));
  for (int i = 0; i <= d; ++i) b[static_cast<std::size_t>(i)] = i + 1;
  return b;
}

bool ProbabilityTable::has(int alpha, int beta) const { return contains(prep_bases, alpha) && contains(meas_bases, beta); }

double ProbabilityTable::at(int alpha, int m, int beta, int n) const {
  if (alpha < 1 || alpha > dim + 1 || beta < 1 || beta > dim + 1 || m < 1 || m > dim || n < 1 || n > dim)
    throw Error(Errc::IndexOutOfRange, "setting outside table");
  if (!has(alpha, beta))
    throw Error(Errc::MissingEntries, "no entries for bases (" + std::to_string(alpha) + "," + std::to_string(beta) + ")");
  return entries[SettingIndex{dim}(alpha, m, beta, n)];
}

bool TomographyData::has(int alpha, int beta) const { return contains(prep_bases, alpha) && contains(meas_bases, beta); }

std::string to_string(SamplingModel::Kind kind) {
  switch (kind) {
    case SamplingModel::Kind::Poisson: return "poisson";
    case SamplingModel::Kind::Multinomial: return "multinomial";
    case SamplingModel::Kind::Exact: return "exact";
  }
  return "unknown";
}

SamplingModel::Kind sampling_kind_from_string(const std::string& s) {
  if (s == "poisson") return SamplingModel::Kind::Poisson;
  if (s == "multinomial") return SamplingModel::Kind::Multinomial;
  if (s == "exact") return SamplingModel::Kind::Exact;
  throw Error(Errc::InvalidModel, "unknown sampling model '" + s + "'");
}

std::string to_string(StopReason r) { return r == StopReason::Converged ? "converged" : "max_iter"; }

ProbabilityTable forward_probabilities(const Channel& channel, const MubFamily& mubs,
                                       const std::vector<int>& prep_bases, const std::vector<int>& meas_bases) {
  const int d = mubs.dim();
  if (channel.dim() != d) throw Error(Errc::DimensionMismatch, "channel and MUB dimensions differ");
  check_bases(prep_bases, d);
  check_bases(meas_bases, d);
  SettingIndex idx{d};
  ProbabilityTable t{d, sorted_unique(prep_bases), sorted_unique(meas_bases),
                     std::vector<double>(idx.size(), std::numeric_limits<double>::quiet_NaN())};
  const Matrix& rho = channel.choi().matrix;
  for (int a : t.prep_bases)
    for (int m = 1; m <= d; ++m)
      for (int b : t.meas_bases)
        for (int n = 1; n <= d; ++n) {
          const Vector v = setting_vector(mubs, a, m, b, n);
          t.entries[idx(a, m, b, n)] = clean_probability(d * v.dot(rho * v).real());
        }
  return t;
}

ProbabilityTable forward_probabilities(const Channel& channel, const MubFamily& mubs) {
  return forward_probabilities(channel, mubs, all_bases(mubs.dim()), all_bases(mubs.dim()));
}

ProbabilityTable forward_probabilities_direct(const Channel& channel, const MubFamily& mubs,
                                              const std::vector<int>& prep_bases,
                                              const std::vector<int>& meas_bases) {
  const int d = mubs.dim();
  if (channel.dim() != d) throw Error(Errc::DimensionMismatch, "channel and MUB dimensions differ");
  check_bases(prep_bases, d);
  check_bases(meas_bases, d);
  SettingIndex idx{d};
  ProbabilityTable t{d, sorted_unique(prep_bases), sorted_unique(meas_bases),
                     std::vector<double>(idx.size(), std::numeric_limits<double>::quiet_NaN())};
  for (int a : t.prep_bases)
    for (int m = 1; m <= d; ++m) {
      const Matrix out = qpt::apply(channel, projector(mubs, a, m));
      for (int b : t.meas_bases)
        for (int n = 1; n <= d; ++n) {
          const Vector& psi = mubs.state(b, n).amplitudes;
          t.entries[idx(a, m, b, n)] = clean_probability(psi.dot(out * psi).real());
        }
    }
  return t;
}

TomographyData sample_counts(const ProbabilityTable& table, const SamplingModel& model, std::uint64_t seed) {
  if (model.kind == SamplingModel::Kind::Poisson && !(model.mean_counts > 0.0 && std::isfinite(model.mean_counts)))
    throw Error(Errc::InvalidModel, "poisson mean must be positive");
  if (model.kind == SamplingModel::Kind::Multinomial && model.total <= 0)
    throw Error(Errc::InvalidModel, "multinomial total must be positive");
  const int d = table.dim;
  SettingIndex idx{d};
  TomographyData data{d, table.prep_bases, table.meas_bases, std::vector<double>(idx.size(), 0.0), model, seed, 0.0};

  std::vector<std::size_t> groups;
  for (int a : table.prep_bases)
    for (int m = 1; m <= d; ++m)
      for (int b : table.meas_bases) groups.push_back(idx(a, m, b, 1));

  const auto ngroups = static_cast<std::ptrdiff_t>(groups.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t g = 0; g < ngroups; ++g) {
    const std::size_t first = groups[static_cast<std::size_t>(g)];
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(first)));
    auto prob = [&](int n) { return std::clamp(table.entries[first + static_cast<std::size_t>(n)], 0.0, 1.0); };
    switch (model.kind) {
      case SamplingModel::Kind::Exact:
        for (int n = 0; n < d; ++n) data.counts[first + static_cast<std::size_t>(n)] = prob(n);
        break;
      case SamplingModel::Kind::Poisson:
        for (int n = 0; n < d; ++n) {
          const double mean = model.mean_counts * prob(n);
          if (mean <= 0.0) continue;
          std::poisson_distribution<std::int64_t> dist(mean);
          data.counts[first + static_cast<std::size_t>(n)] = static_cast<double>(dist(rng));
        }
        break;
      case SamplingModel::Kind::Multinomial: {
        std::int64_t remaining = model.total;
        double mass = 1.0;
        for (int n = 0; n < d && remaining > 0; ++n) {
          const double p = prob(n);
          std::int64_t k = remaining;
          if (n < d - 1) {
            const double q = mass > 0.0 ? std::clamp(p / mass, 0.0, 1.0) : 0.0;
            std::binomial_distribution<std::int64_t> dist(remaining, q);
            k = dist(rng);
          }
          data.counts[first + static_cast<std::size_t>(n)] = static_cast<double>(k);
          remaining -= k;
          mass -= p;
        }
        break;
      }
    }
  }
  return data;
}

std::vector<double> group_frequencies(const TomographyData& data) {
  const int d = data.dim;
  std::vector<double> f(data.counts.size(), 0.0);
  for (std::size_t first = 0; first < data.counts.size(); first += static_cast<std::size_t>(d)) {
    double total = 0.0;
    for (int n = 0; n < d; ++n) total += data.counts[first + static_cast<std::size_t>(n)];
    if (total <= 0.0) continue;
    for (int n = 0; n < d; ++n) f[first + static_cast<std::size_t>(n)] = data.counts[first + static_cast<std::size_t>(n)] / total;
  }
  return f;
}

Matrix tomography_vectors(const MubFamily& mubs) {
  const int d = mubs.dim();
  SettingIndex idx{d};
  Matrix v(static_cast<Eigen::Index>(idx.size()), d * d);
  for (int a = 1; a <= d + 1; ++a)
    for (int m = 1; m <= d; ++m)
      for (int b = 1; b <= d + 1; ++b)
        for (int n = 1; n <= d; ++n)
          v.row(static_cast<Eigen::Index>(idx(a, m, b, n))) = setting_vector(mubs, a, m, b, n).transpose();
  return v;
}

double loglikelihood(const TomographyData& data, const MubFamily& mubs, const ChoiMatrix& choi) {
  if (data.dim != mubs.dim() || choi.dim != mubs.dim()) throw Error(Errc::DimensionMismatch, "dimensions differ");
  const CompactData c = compact(data, mubs);
  return kernels::log_likelihood(c.freqs, probabilities(c.vectors, choi.matrix, data.dim, true), kProbabilityFloor);
}

ChoiMatrix project_trace_preserving(const ChoiMatrix& c) {
  const int d = c.dim;
  Matrix excess = linalg::partial_trace_second(c.matrix, d, d) - Matrix::Identity(d, d) / static_cast<double>(d);
  return {d, c.matrix - linalg::kron(excess, Matrix::Identity(d, d)) / static_cast<double>(d)};
}

double fixed_point_residual(const TomographyData& data, const MubFamily& mubs, const ChoiMatrix& choi) {
  const CompactData c = compact(data, mubs);
  const Matrix r = r_operator(c, probabilities(c.vectors, choi.matrix, data.dim, true), true);
  return linalg::max_abs(normalized(r * choi.matrix * r) - choi.matrix);
}

MleResult mle_reconstruct(const TomographyData& data, const MubFamily& mubs, const MleOptions& opts) {
  const int d = mubs.dim();
  if (data.dim != d) throw Error(Errc::DimensionMismatch, "data and MUB dimensions differ");
  if (!opts.allow_incomplete) {
    SettingIndex idx{d};
    for (int a = 1; a <= d + 1; ++a)
      for (int b = 1; b <= d + 1; ++b) {
        if (!data.has(a, b))
          throw Error(Errc::IncompleteData, "bases (" + std::to_string(a) + "," + std::to_string(b) + ") not measured");
        for (int m = 1; m <= d; ++m) {
          double total = 0.0;
          for (int n = 1; n <= d; ++n) total += data.counts[idx(a, m, b, n)];
          if (total <= 0.0)
            throw Error(Errc::IncompleteData, "no counts for prepared state (" + std::to_string(a) + "," +
                                                  std::to_string(m) + ") in basis " + std::to_string(b));
        }
      }
  }

  const CompactData c = compact(data, mubs);
  if (c.freqs.size() == 0) throw Error(Errc::IncompleteData, "no counts");
  const int dd = d * d;
  const Matrix identity = Matrix::Identity(dd, dd);
  Matrix rho = identity / static_cast<double>(dd);

  auto evaluate = [&](Matrix m) {
    Candidate cand{std::move(m), RealVector(), -std::numeric_limits<double>::infinity()};
    cand.p = probabilities(c.vectors, cand.rho, d, opts.parallel);
    if (supports_data(cand.p))
      cand.log_likelihood = opts.parallel ? kernels::log_likelihood(c.freqs, cand.p, kProbabilityFloor)
                                          : kernels::log_likelihood_serial(c.freqs, cand.p, kProbabilityFloor);
    return cand;
  };

  MleResult result;
  result.stop_reason = StopReason::MaxIter;
  Candidate current = evaluate(rho);
  double eta = 1.0;
  for (int k = 0; k < opts.max_iter; ++k) {
    if (opts.record_trace) result.log_likelihood_trace.push_back(current.log_likelihood);
    Matrix r = r_operator(c, current.p, opts.parallel);
    r /= (r * current.rho).trace().real();
    Matrix step_rho;
    if (opts.dilution > 0.0) {
      const Matrix step = (identity + opts.dilution * r) / (1.0 + opts.dilution);
      step_rho = normalized(step * current.rho * step);
    } else {
      step_rho = normalized(r * current.rho * r);
    }
    // Distance moved by the plain step, i.e. the fixed-point residual.
    const double residual = linalg::max_abs(step_rho - current.rho);
    Candidate best = evaluate(std::move(step_rho));

    // Safeguarded gradient step from the R rho R result: R rho R alone only
    // shrinks eigenvalues that should vanish like 1/k, while the projection
    // can set them to zero. Kept only if it raises the likelihood further.
    if (opts.accelerate && std::isfinite(best.log_likelihood)) {
      Matrix r2 = r_operator(c, best.p, opts.parallel);
      r2 /= (r2 * best.rho).trace().real();
      for (int attempt = 0; attempt < 3; ++attempt) {
        Candidate pg = evaluate(project_state(best.rho + eta * (r2 - identity)));
        if (pg.log_likelihood > best.log_likelihood) {
          best = std::move(pg);
          eta *= 1.5;
          break;
        }
        eta = std::max(eta * 0.5, 1e-12);
      }
    }
    if (!best.rho.allFinite()) break;

    result.last_step = linalg::max_abs(best.rho - current.rho);
    current = std::move(best);
    result.iterations = k + 1;
    if (std::max(result.last_step, residual) < opts.stop_tol) {
      result.stop_reason = StopReason::Converged;
      break;
    }
  }
  rho = current.rho;

  const RealVector p = probabilities(c.vectors, rho, d, opts.parallel);
  result.log_likelihood = kernels::log_likelihood(c.freqs, p, kProbabilityFloor);
  if (opts.record_trace) result.log_likelihood_trace.push_back(result.log_likelihood);

  result.estimate = ChoiMatrix{d, rho};
  if (opts.project_tp) result.estimate = project_trace_preserving(result.estimate);
  result.tp_deviation = validate_channel(result.estimate).tp_deviation;
  return result;
}

}  // namespace qpt

#include "qpt/metrics.hpp"

#include <cmath>

#include "qpt/error.hpp"

namespace qpt {

double process_fidelity(const ProcessMatrix& chi_exp, const ProcessMatrix& chi_target) {
  if (chi_exp.dim != chi_target.dim) throw Error(Errc::DimensionMismatch, "process matrices differ in dimension");
  if (!chi_exp.basis || !chi_target.basis || chi_exp.basis->name != chi_target.basis->name ||
      chi_exp.basis->dim != chi_target.basis->dim)
    throw Error(Errc::BasisMismatch, "process matrices use different operator bases");
  return (chi_exp.matrix * chi_target.matrix).trace().real();
}

double average_fidelity_from_process(double process_fidelity, int d) {
  if (d < 2) throw Error(Errc::OutOfRange, "dimension must be at least 2");
  if (process_fidelity < -1e-9 || process_fidelity > 1.0 + 1e-9)
    throw Error(Errc::OutOfRange, "process fidelity " + std::to_string(process_fidelity));
  return (d * process_fidelity + 1.0) / (d + 1.0);
}

double average_purity_from_fidelity(double average_fidelity, int d) {
  if (d < 2) throw Error(Errc::OutOfRange, "dimension must be at least 2");
  if (average_fidelity < -1e-9 || average_fidelity > 1.0 + 1e-9)
    throw Error(Errc::OutOfRange, "average fidelity " + std::to_string(average_fidelity));
  return (1.0 - 2.0 * average_fidelity + d * average_fidelity * average_fidelity) / (d - 1.0);
}

double error_rate(const ProbabilityTable& table, const std::vector<int>& bases) {
  if (bases.empty()) throw Error(Errc::EmptySubset, "error rate needs at least one basis");
  double correct = 0.0;
  int count = 0;
  for (int a : bases) {
    if (!table.has(a, a)) throw Error(Errc::MissingEntries, "matched basis " + std::to_string(a) + " not in table");
    for (int m = 1; m <= table.dim; ++m) {
      correct += table.at(a, m, a, m);
      ++count;
    }
  }
  return 1.0 - correct / count;
}

double state_fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw Error(Errc::DimensionMismatch, "states differ in dimension");
  const Matrix s = linalg::psd_sqrt(rho);
  const Matrix inner = linalg::psd_sqrt(s * sigma * s);
  const double f = inner.trace().real();
  return std::clamp(f * f, 0.0, 1.0);
}

ChannelMetrics channel_metrics(const Channel& channel, const Channel& target, const MubFamily& mubs) {
  const int d = channel.dim();
  if (target.dim() != d) throw Error(Errc::DimensionMismatch, "channel and target dimensions differ");
  ChannelMetrics m;
  m.dim = d;
  m.label = channel.label();
  auto basis = weyl_basis(d);
  m.process_fidelity = process_fidelity(channel.chi(basis), target.chi(basis));
  m.average_fidelity = average_fidelity_from_process(m.process_fidelity, d);
  m.average_purity = average_purity_from_fidelity(m.average_fidelity, d);
  const std::vector<int> all = all_bases(d);
  const ProbabilityTable table = forward_probabilities(channel, mubs, all, all);
  m.q_bb84 = error_rate(table, {1, 2});
  m.q_full = error_rate(table, all);
  return m;
}

}  // namespace qpt

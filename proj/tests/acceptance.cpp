// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each criterion checks its own wall-clock budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qpt/keyrate.hpp"
#include "qpt/metrics.hpp"
#include "qpt/tomo.hpp"

using namespace qpt;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<int> kDims{2, 3, 4, 5};

std::vector<std::pair<std::string, Channel>> built_ins(int d, const MubFamily& mubs) {
  return {{"identity", identity_channel(d)},
          {"depolarizing(0.9)", depolarizing_with_fidelity(d, 0.9)},
          {"optimal_cloning", optimal_cloning_channel(d)},
          {"intercept_resend(all)", intercept_resend_channel(mubs, all_bases(d))},
          {"intercept_resend(2,3)", intercept_resend_channel(mubs, {2, 3})},
          {"intercept_resend(1)", intercept_resend_channel(mubs, {1})}};
}

// Averages over all d(d+1) MUB states. A complete MUB set is a 2-design, so
// these equal the Haar averages of the (quadratic) fidelity and purity.
double design_average_fidelity(const Channel& ch, const MubFamily& mubs) {
  const int d = mubs.dim();
  double sum = 0.0;
  for (int a = 1; a <= d + 1; ++a)
    for (int m = 1; m <= d; ++m) {
      const Vector& psi = mubs.state(a, m).amplitudes;
      sum += psi.dot(qpt::apply(ch, linalg::projector(psi)) * psi).real();
    }
  return sum / (d * (d + 1.0));
}

double design_average_purity(const Channel& ch, const MubFamily& mubs) {
  const int d = mubs.dim();
  double sum = 0.0;
  for (int a = 1; a <= d + 1; ++a)
    for (int m = 1; m <= d; ++m) {
      const Matrix out = qpt::apply(ch, linalg::projector(mubs.state(a, m).amplitudes));
      sum += (out * out).trace().real();
    }
  return sum / (d * (d + 1.0));
}

struct Reconstruction {
  int d;
  std::string name;
  Channel estimate;
};
std::vector<Reconstruction> g_reconstructions;

// ---------------------------------------------------------------------------

Outcome mub_validity() {
  Outcome o;
  double worst_overlap = 0.0, worst_completeness = 0.0;
  for (int d : kDims) {
    const MubFamily mubs = generate_mubs(d);
    Matrix sum = Matrix::Zero(d, d);
    for (int a = 1; a <= d + 1; ++a)
      for (int m = 1; m <= d; ++m) {
        const Vector& psi = mubs.state(a, m).amplitudes;
        sum += psi * psi.adjoint();
        for (int b = a + 1; b <= d + 1; ++b)
          for (int n = 1; n <= d; ++n) {
            const double ov = std::norm(psi.dot(mubs.state(b, n).amplitudes));
            worst_overlap = std::max(worst_overlap, std::abs(ov - 1.0 / d));
          }
      }
    worst_completeness = std::max(worst_completeness, linalg::max_abs(sum / (d + 1.0) - Matrix::Identity(d, d)));
  }
  o.pass = worst_overlap < 1e-10 && worst_completeness < 1e-10;
  o.detail = "max |overlap-1/d| " + fmt("%.1e", worst_overlap) + ", completeness " + fmt("%.1e", worst_completeness);
  return o;
}

Outcome attack_fidelities() {
  Outcome o;
  double worst = 0.0;
  for (int d : kDims) {
    const MubFamily mubs = generate_mubs(d);
    const auto cl = forward_probabilities(optimal_cloning_channel(d), mubs);
    const auto ir = forward_probabilities(intercept_resend_channel(mubs, all_bases(d)), mubs);
    for (int a = 1; a <= d + 1; ++a)
      for (int m = 1; m <= d; ++m) {
        worst = std::max(worst, std::abs(cl.at(a, m, a, m) - (0.5 + 1.0 / (1.0 + d))));
        worst = std::max(worst, std::abs(ir.at(a, m, a, m) - 2.0 / (1.0 + d)));
      }
    if (d == 2)
      o.detail = "d=2 cloning " + fmt("%.6f", cl.at(1, 1, 1, 1)) + ", intercept-resend " + fmt("%.6f", ir.at(1, 1, 1, 1));
  }
  o.pass = worst < 1e-10;
  o.detail += "; max deviation " + fmt("%.1e", worst);
  return o;
}

Outcome mle_oracle_recovery() {
  Outcome o;
  double worst_td = 0.0;
  int worst_iters = 0, runs = 0;
  std::string failures;
  g_reconstructions.clear();
  for (int d : kDims) {
    const MubFamily mubs = generate_mubs(d);
    for (const auto& [name, ch] : built_ins(d, mubs)) {
      const auto data = sample_counts(forward_probabilities(ch, mubs), SamplingModel::exact(), 0);
      const MleResult r = mle_reconstruct(data, mubs);
      const double td = linalg::trace_distance(r.estimate.matrix, ch.choi().matrix);
      bool monotone = true;
      for (std::size_t k = 1; k < r.log_likelihood_trace.size(); ++k)
        monotone = monotone && r.log_likelihood_trace[k] >= r.log_likelihood_trace[k - 1] - 1e-9;
      const bool ok = td < 1e-5 && r.iterations <= 20000 && monotone;
      if (!ok) failures += " d=" + std::to_string(d) + " " + name + "(td " + fmt("%.1e", td) + ")";
      o.pass = o.pass && ok;
      worst_td = std::max(worst_td, td);
      worst_iters = std::max(worst_iters, r.iterations);
      ++runs;
      g_reconstructions.push_back({d, name, Channel(r.estimate, name)});
    }
  }
  o.detail = std::to_string(runs) + " reconstructions, max trace distance " + fmt("%.1e", worst_td) +
             ", max iterations " + std::to_string(worst_iters) + (failures.empty() ? "" : "; failed:" + failures);
  return o;
}

Outcome figure_of_merit_relations() {
  Outcome o;
  if (g_reconstructions.empty()) return {false, "needs the reconstructions of criterion 3"};
  double worst_rel = 0.0, worst_design = 0.0;
  for (const auto& rec : g_reconstructions) {
    const MubFamily mubs = generate_mubs(rec.d);
    const ChannelMetrics m = channel_metrics(rec.estimate, identity_channel(rec.d), mubs);
    const int d = rec.d;
    worst_rel = std::max(worst_rel, std::abs(m.average_fidelity - (d * m.process_fidelity + 1.0) / (d + 1.0)));
    worst_rel = std::max(worst_rel, std::abs(m.average_purity - (1.0 - 2.0 * m.average_fidelity +
                                                                 d * m.average_fidelity * m.average_fidelity) /
                                                                    (d - 1.0)));
    // Independent route: F̄ as a 2-design average of output state fidelities.
    worst_design = std::max(worst_design, std::abs(design_average_fidelity(rec.estimate, mubs) - m.average_fidelity));
  }

  // Theory counterparts of the attack rows, including purity via the 2-design.
  double worst_theory = 0.0;
  double ir5_fp = 0.0;
  for (int d : kDims) {
    const MubFamily mubs = generate_mubs(d);
    const std::pair<Channel, double> rows[] = {{optimal_cloning_channel(d), 0.5 + 1.0 / (1.0 + d)},
                                               {intercept_resend_channel(mubs, all_bases(d)), 2.0 / (1.0 + d)}};
    for (const auto& [ch, fbar] : rows) {
      const ChannelMetrics m = channel_metrics(ch, identity_channel(d), mubs);
      const double fp = ((d + 1.0) * fbar - 1.0) / d;
      const double pbar = (1.0 - 2.0 * fbar + d * fbar * fbar) / (d - 1.0);
      worst_theory = std::max({worst_theory, std::abs(m.process_fidelity - fp), std::abs(m.average_fidelity - fbar),
                               std::abs(m.average_purity - pbar), std::abs(design_average_purity(ch, mubs) - pbar)});
      if (d == 5 && fbar < 0.5) ir5_fp = m.process_fidelity;
    }
  }
  o.pass = worst_rel < 1e-12 && worst_design < 1e-12 && worst_theory < 1e-12 && std::abs(ir5_fp - 0.2) < 1e-12;
  o.detail = "relations " + fmt("%.1e", worst_rel) + ", 2-design F_avg " + fmt("%.1e", worst_design) + ", theory rows " +
             fmt("%.1e", worst_theory) + "; intercept-resend d=5 F_P = " + fmt("%.4f", ir5_fp) +
             " (measured 0.171 +- 0.001)";
  return o;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) > 0) == (f(mid) > 0) ? lo = mid : hi = mid;
  }
  return 0.5 * (lo + hi);
}

Outcome key_rate_formulas() {
  Outcome o;
  const double q8 = bisect([](double q) { return bb84_rate(2, q); }, 0.0, 0.5, 1e-4);
  const double q9 = bisect([](double q) { return mub_full_rate(2, q); }, 0.0, 0.5, 1e-4);
  const bool values = std::abs(bb84_rate(2, 0.0) - 1.0) < 1e-12 && std::abs(mub_full_rate(5, 0.0) - std::log2(5.0)) < 1e-12;
  o.pass = values && std::abs(q8 - 0.1100) < 1e-4 && std::abs(q9 - 0.1262) < 1e-4;
  o.detail = "K_bb84(2,0)=" + fmt("%.12g", bb84_rate(2, 0.0)) + ", K_mub(5,0)=" + fmt("%.12g", mub_full_rate(5, 0.0)) +
             ", roots Q=" + fmt("%.5f", q8) + " (BB84), " + fmt("%.5f", q9) + " (d+1 MUBs)";
  return o;
}

Outcome devetak_winter_consistency() {
  Outcome o;
  double worst = 0.0;
  int points = 0;
  std::vector<double> grid;
  for (int i = 80; i <= 100; ++i) grid.push_back(i / 100.0);
  for (int d : kDims) {
    const auto rows =
        sweep_noise_model(symmetric_noise_model(d), grid, generate_mubs(d), {Protocol::DevetakWinter}, Detection::Sort);
    for (const auto& r : rows) {
      worst = std::max(worst, std::abs(*r.k_dw - mub_full_rate(d, 1.0 - r.fidelity)));
      ++points;
    }
  }
  o.pass = worst < 1e-6;
  o.detail = std::to_string(points) + " points, max |K_dw - K_mub(d,1-F)| " + fmt("%.1e", worst);
  return o;
}

Outcome asymmetric_advantage() {
  Outcome o;
  const std::vector<Protocol> protos{Protocol::MubFull, Protocol::DevetakWinter};

  // Rank 2 at d=2: Q = 2(1-F)/3, so F in [0.49, 1] covers Q in [0, 0.34].
  std::vector<double> fine;
  for (int i = 0; i <= 204; ++i) fine.push_back(0.49 + i * 0.0025);
  const auto rank2 = sweep_noise_model(rank_noise_model(2, {1}), fine, generate_mubs(2), protos);
  bool positive = true;
  double first_zero_q = -1.0, min_positive = 1e9;
  for (auto it = rank2.rbegin(); it != rank2.rend(); ++it) {  // increasing Q
    const double q = it->q_full, k = *it->k_dw;
    if (q > 1e-12 && q <= 0.32 + 1e-12) {
      positive = positive && k > 0.0;
      min_positive = std::min(min_positive, k);
    }
    if (first_zero_q < 0.0 && k <= 1e-12 && q > 1e-12) first_zero_q = q;
  }
  const bool threshold = first_zero_q > 0.0 && first_zero_q <= 0.34 + 1e-12 && std::abs(first_zero_q - 0.33) <= 0.01;

  double worst_gap = 1e9;
  int models = 0, points = 0;
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(0.5 + i * 0.01);
  for (int d : kDims) {
    const MubFamily mubs = generate_mubs(d);
    for (const auto& idx : asymmetric_model_indices(d)) {
      if (d == 2 && idx.size() == 1) continue;  // the rank-2 model above
      ++models;
      for (const auto& r : sweep_noise_model(rank_noise_model(d, idx), grid, mubs, protos)) {
        if (!r.k_mub) continue;
        worst_gap = std::min(worst_gap, *r.k_dw - *r.k_mub);
        ++points;
      }
    }
  }
  o.pass = positive && threshold && worst_gap >= -1e-9;
  o.detail = "rank-2 d=2: K_dw > 0 on (0,0.32] (min " + fmt("%.2e", min_positive) + "), first K_dw <= 0 at Q=" +
             fmt("%.4f", first_zero_q) + "; " + std::to_string(models) + " other models, " + std::to_string(points) +
             " points, min K_dw - K_mub " + fmt("%.1e", worst_gap);
  return o;
}

Outcome attack_detection() {
  Outcome o;
  double worst = -1e9;
  int reports = 0;
  const std::vector<Protocol> protos{Protocol::Bb84, Protocol::MubFull, Protocol::DevetakWinter};
  for (int d : kDims) {
    const MubFamily mubs = generate_mubs(d);
    for (const Channel& ch : {optimal_cloning_channel(d), intercept_resend_channel(mubs, all_bases(d))})
      for (Detection det : {Detection::Sort, Detection::Filter})
        for (const auto& r : key_rates(ch, mubs, protos, det)) {
          ++reports;
          if (!r.key_rate) continue;  // Q beyond the formula's domain: no key either
          worst = std::max(worst, *r.key_rate);
        }
  }
  o.pass = worst <= 1e-12;
  o.detail = std::to_string(reports) + " rate reports, largest K " + fmt("%.4f", worst);
  return o;
}

Outcome two_mub_structure() {
  Outcome o;
  const MubFamily mubs = generate_mubs(2);
  const Channel ir = intercept_resend_channel(mubs, {2, 3});
  const ProcessMatrix chi = ir.chi();
  int nonzero = 0;
  for (int i = 0; i < 4; ++i) nonzero += std::abs(chi.matrix(i, i)) > 1e-10;
  const auto t = forward_probabilities(ir, mubs);
  double fid[3];
  for (int a = 1; a <= 3; ++a) fid[a - 1] = 0.5 * (t.at(a, 1, a, 1) + t.at(a, 2, a, 2));
  const bool basis_dependent = std::abs(fid[0] - 0.5) < 1e-10 && std::abs(fid[1] - 0.75) < 1e-10 &&
                               std::abs(fid[2] - 0.75) < 1e-10;
  o.pass = nonzero == 3 && basis_dependent;
  o.detail = std::to_string(nonzero) + " nonzero chi diagonals (" + fmt("%.3f", chi.matrix(0, 0).real()) + ", " +
             fmt("%.3f", chi.matrix(1, 1).real()) + ", " + fmt("%.3f", chi.matrix(2, 2).real()) + ", " +
             fmt("%.3f", chi.matrix(3, 3).real()) + "); matched-basis fidelities " + fmt("%.3f", fid[0]) + ", " +
             fmt("%.3f", fid[1]) + ", " + fmt("%.3f", fid[2]);
  return o;
}

Outcome statistical_pipeline() {
  Outcome o;
  const int d = 3;
  const MubFamily mubs = generate_mubs(d);
  const Channel truth = optimal_cloning_channel(d);
  auto pipeline = [&](std::uint64_t seed) {
    const auto data = sample_counts(forward_probabilities(truth, mubs), SamplingModel::poisson(1e5), seed);
    return mle_reconstruct(data, mubs);
  };
  const MleResult a = pipeline(20240), b = pipeline(20240);
  const Channel est(a.estimate, "estimate");
  const double fidelity = state_fidelity(a.estimate.matrix, truth.choi().matrix);
  const ChannelMetrics m = channel_metrics(est, identity_channel(d), mubs);
  const auto rates = key_rates(est, mubs, {Protocol::DevetakWinter}, Detection::Filter);
  const bool reproducible = a.estimate.matrix == b.estimate.matrix && a.iterations == b.iterations;
  o.pass = fidelity >= 0.99 && reproducible;
  o.detail = "process fidelity to truth " + fmt("%.5f", fidelity) + ", F_P vs identity " +
             fmt("%.4f", m.process_fidelity) + " (theory 0.6667), K_dw " + fmt("%.4f", *rates[0].key_rate) +
             ", iterations " + std::to_string(a.iterations) + (reproducible ? ", seed-reproducible" : ", NOT reproducible");
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "MUB validity", 1.0, mub_validity},
      {2, "attack fidelities", 1.0, attack_fidelities},
      {3, "MLE oracle recovery", 60.0, mle_oracle_recovery},
      {4, "figure-of-merit relations", 60.0, figure_of_merit_relations},
      {5, "key-rate formulas", 1.0, key_rate_formulas},
      {6, "Devetak-Winter consistency", 60.0, devetak_winter_consistency},
      {7, "asymmetric advantage", 60.0, asymmetric_advantage},
      {8, "attack detection", 60.0, attack_detection},
      {9, "2-MUB intercept-resend structure", 60.0, two_mub_structure},
      {10, "statistical pipeline", 300.0, statistical_pipeline},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] %2d %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), secs,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}

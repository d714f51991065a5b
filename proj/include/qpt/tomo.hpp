#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpt/channel.hpp"
#include "qpt/mub.hpp"

namespace qpt {

/// Flat index of a (prepared α,m ; measured β,n) setting, all 1-based.
struct SettingIndex {
  int dim;
  std::size_t operator()(int alpha, int m, int beta, int n) const {
    const auto b = static_cast<std::size_t>(dim + 1);
    const auto d = static_cast<std::size_t>(dim);
    return ((static_cast<std::size_t>(alpha - 1) * d + (m - 1)) * b + (beta - 1)) * d + (n - 1);
  }
  std::size_t size() const {
    const auto b = static_cast<std::size_t>(dim + 1);
    return b * b * static_cast<std::size_t>(dim) * dim;
  }
};

/// Born-rule probabilities p^(α,β)_{m,n} = Tr[Π^(β)_n E(Π^(α)_m)]. Only the
/// (α, β) pairs in prep_bases × meas_bases are populated.
struct ProbabilityTable {
  int dim = 0;
  std::vector<int> prep_bases;
  std::vector<int> meas_bases;
  std::vector<double> entries;  // SettingIndex layout, NaN when absent

  bool has(int alpha, int beta) const;
  double at(int alpha, int m, int beta, int n) const;
};

struct SamplingModel {
  enum class Kind { Poisson, Multinomial, Exact };
  Kind kind = Kind::Poisson;
  double mean_counts = 1000.0;  // Poisson: mean per setting is mean_counts * p
  std::int64_t total = 1000;    // Multinomial: shots per (α,m,β) group

  static SamplingModel poisson(double mean) { return {Kind::Poisson, mean, 0}; }
  static SamplingModel multinomial(std::int64_t total) { return {Kind::Multinomial, 0.0, total}; }
  static SamplingModel exact() { return {Kind::Exact, 0.0, 0}; }
};

std::string to_string(SamplingModel::Kind kind);
SamplingModel::Kind sampling_kind_from_string(const std::string& s);

/// Observed counts per setting. Exact mode stores probabilities in place of
/// counts ("infinite shots").
struct TomographyData {
  int dim = 0;
  std::vector<int> prep_bases;
  std::vector<int> meas_bases;
  std::vector<double> counts;  // SettingIndex layout, 0 where absent
  SamplingModel model;
  std::uint64_t seed = 0;
  double integration_seconds = 0.0;

  bool has(int alpha, int beta) const;
  double at(int alpha, int m, int beta, int n) const { return counts[SettingIndex{dim}(alpha, m, beta, n)]; }
};

/// All d+1 labels 1..d+1.
std::vector<int> all_bases(int d);

ProbabilityTable forward_probabilities(const Channel& channel, const MubFamily& mubs,
                                       const std::vector<int>& prep_bases,
                                       const std::vector<int>& meas_bases);
ProbabilityTable forward_probabilities(const Channel& channel, const MubFamily& mubs);
/// Same table through E(Π) = apply(...) instead of the Choi trace.
ProbabilityTable forward_probabilities_direct(const Channel& channel, const MubFamily& mubs,
                                              const std::vector<int>& prep_bases,
                                              const std::vector<int>& meas_bases);

TomographyData sample_counts(const ProbabilityTable& table, const SamplingModel& model,
                             std::uint64_t seed);

/// Counts normalized within each (α,m,β) group; empty groups stay zero.
std::vector<double> group_frequencies(const TomographyData& data);

/// Rank-1 vectors v_j = conj(ψ_m^α) ⊗ ψ_n^β for every setting, in
/// SettingIndex order, so that Π_j = (Π^(α)_m)^T ⊗ Π^(β)_n = v_j v_j^†.
Matrix tomography_vectors(const MubFamily& mubs);

/// Σ_j f_j log p_j with p_j = d Tr[Π_j ρ_E], clamped below at 1e-300.
double loglikelihood(const TomographyData& data, const MubFamily& mubs, const ChoiMatrix& choi);

struct MleOptions {
  int max_iter = 20000;
  double stop_tol = 1e-10;
  double dilution = 0.0;  // 0 selects the undamped R ρ R step
  // Follow each R ρ R step with a projected-gradient step, kept only when it
  // raises the likelihood. Off gives the plain R ρ R sequence.
  bool accelerate = true;
  bool project_tp = false;
  bool allow_incomplete = false;
  bool record_trace = true;
  bool parallel = true;
};

enum class StopReason { Converged, MaxIter };
std::string to_string(StopReason r);

struct MleResult {
  ChoiMatrix estimate;
  int iterations = 0;
  double log_likelihood = 0.0;
  std::vector<double> log_likelihood_trace;
  StopReason stop_reason = StopReason::MaxIter;
  double tp_deviation = 0.0;
  double last_step = 0.0;  // ||ρ^(k+1) - ρ^(k)||_max of the final step
};

MleResult mle_reconstruct(const TomographyData& data, const MubFamily& mubs, const MleOptions& opts = {});

/// Frobenius-nearest Choi matrix with Tr_out ρ = I/d. May leave the PSD cone.
ChoiMatrix project_trace_preserving(const ChoiMatrix& c);

/// ||μ R ρ R - ρ||_max at ρ for the given data.
double fixed_point_residual(const TomographyData& data, const MubFamily& mubs, const ChoiMatrix& choi);

}  // namespace qpt

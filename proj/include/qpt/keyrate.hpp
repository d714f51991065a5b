#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpt/channel.hpp"
#include "qpt/mub.hpp"

namespace qpt {

/// h^(d)(x) = -x log2(x/(d-1)) - (1-x) log2(1-x), with 0 log 0 = 0.
double shannon_entropy_d(double x, int d);

/// d-dimensional BB84: log2 d - 2 h^(d)(Q).
double bb84_rate(int d, double q);
/// (d+1)-MUB protocol: log2 d - h^(d)((d+1)Q/d) - (d+1)Q/d log2(d+1).
/// Requires Q <= d/(d+1).
double mub_full_rate(int d, double q);

enum class Detection { Sort, Filter };
std::string to_string(Detection d);
Detection detection_from_string(const std::string& s);

struct PovmSet {
  int dim = 0;
  Detection kind = Detection::Sort;
  int filter_index = 0;  // 0-based outcome for Filter
  std::vector<Matrix> elements;

  static PovmSet sort(int d);
  static PovmSet filter(int d, int index);
};

void validate_povm(const PovmSet& povm);

/// Source-replacement state ρ_AB: the unit-trace Choi matrix.
Matrix choi_to_rho_ab(const Channel& channel);

struct Purification {
  int system_dim = 0;
  int ancilla_dim = 0;
  Vector state;  // system ⊗ ancilla
};

/// Σ_i √λ_i |e_i> ⊗ |i>, ancilla dimension = numerical rank of ρ.
Purification purify(const Matrix& rho, double cutoff = 1e-14);

/// H(Z_A|E) where E is the ancilla of `pur`, a purification of ρ_AB on
/// C^d ⊗ C^d. Depends only on ρ_AB, not on the purification gauge.
double eve_conditional_entropy(const Purification& pur, int d, const PovmSet& za);

struct DevetakWinterTerms {
  double h_za_given_e = 0.0;
  double h_za_given_zb = 0.0;
  double key_rate = 0.0;  // per post-selected signal, efficiency applied
};

/// K = H(Z_A|E) - H(Z_A|Z_B) with Eve holding the purification of ρ_AB on
/// C^d ⊗ C^d. For a filter-type Z_B the sort rate is scaled by 1/d.
DevetakWinterTerms devetak_winter_terms(const Matrix& rho_ab, const PovmSet& za, const PovmSet& zb);
double devetak_winter_rate(const Matrix& rho_ab, const PovmSet& za, const PovmSet& zb);

enum class Protocol { Bb84, MubFull, DevetakWinter };
std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

struct KeyRateReport {
  Protocol protocol = Protocol::DevetakWinter;
  int dim = 0;
  std::optional<double> q;  // coarse-grained error rate fed to the formula
  std::optional<double> key_rate;  // empty when Q is outside the formula's domain
  Detection detection = Detection::Sort;
  double efficiency = 1.0;
};

std::vector<KeyRateReport> key_rates(const Channel& channel, const MubFamily& mubs,
                                     const std::vector<Protocol>& protocols, Detection detection);

/// Family of diagonal χ (Weyl basis) parameterized by F.
struct NoiseModel {
  std::string name;
  int dim = 0;
  std::function<std::map<int, double>(double)> weights;
};

/// χ_00 = F, uniform (1-F)/|indices| on the given Weyl indices.
NoiseModel rank_noise_model(int d, std::vector<int> indices);
/// Depolarizing χ of full rank d².
NoiseModel symmetric_noise_model(int d);
/// Weyl index sets of the lower-rank diagonal models studied for d = 2..5
/// (e.g. d=2: {1} and {1,2}), highest rank first. Empty for other d.
std::vector<std::vector<int>> asymmetric_model_indices(int d);

struct SweepRow {
  double fidelity = 0.0;
  double q_full = 0.0;
  double q_bb84 = 0.0;
  std::optional<double> k_bb84;
  std::optional<double> k_mub;
  std::optional<double> k_dw;
};

std::vector<SweepRow> sweep_noise_model(const NoiseModel& model, const std::vector<double>& fidelity_grid,
                                        const MubFamily& mubs, const std::vector<Protocol>& protocols,
                                        Detection detection = Detection::Sort);

}  // namespace qpt

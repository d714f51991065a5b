#pragma once

#include <string>
#include <vector>

#include "qpt/channel.hpp"
#include "qpt/tomo.hpp"

namespace qpt {

/// F_P = Tr(χ_exp χ_target). Both matrices must share dimension and basis.
double process_fidelity(const ProcessMatrix& chi_exp, const ProcessMatrix& chi_target);

/// F̄ = (d F_P + 1)/(d + 1).
double average_fidelity_from_process(double process_fidelity, int d);
/// P̄ = (1 - 2F̄ + d F̄²)/(d - 1).
double average_purity_from_fidelity(double average_fidelity, int d);

/// Q = 1 - mean over α ∈ bases, m of p^(α,α)_{m,m}.
double error_rate(const ProbabilityTable& table, const std::vector<int>& bases);

/// Uhlmann fidelity (Tr √(√ρ σ √ρ))².
double state_fidelity(const Matrix& rho, const Matrix& sigma);

struct ChannelMetrics {
  int dim = 0;
  double process_fidelity = 0.0;
  double average_fidelity = 0.0;
  double average_purity = 0.0;
  double q_bb84 = 0.0;  // bases {1, 2}
  double q_full = 0.0;  // all d+1 bases
  std::string label;
};

/// Table-1 style figures of merit of `channel` against `target`.
ChannelMetrics channel_metrics(const Channel& channel, const Channel& target, const MubFamily& mubs);

}  // namespace qpt

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpt/linalg.hpp"
#include "qpt/mub.hpp"

namespace qpt {

/// d^2 operators A_0..A_{d^2-1} with A_0 = I and Tr(A_m^† A_n) = d δ_mn.
struct OperatorBasis {
  int dim = 0;
  std::string name;
  std::vector<Matrix> operators;
};

/// Weyl-Heisenberg basis X^j Z^k with X|n> = |n+1>, Z|n> = ω^n |n>,
/// indexed m = j*d + k. At d = 2 this is {I, Z, X, XZ}.
std::shared_ptr<const OperatorBasis> weyl_basis(int d);

struct KrausSet {
  int dim = 0;
  std::vector<Matrix> operators;
};

/// Unit-trace Choi state (I ⊗ E)|Φ><Φ| with |Φ> = Σ|ii>/√d; input factor
/// first.
struct ChoiMatrix {
  int dim = 0;
  Matrix matrix;
};

struct ProcessMatrix {
  int dim = 0;
  std::shared_ptr<const OperatorBasis> basis;
  Matrix matrix;
};

/// A CPTP map. The Choi matrix is canonical; a Kraus set is kept when the
/// builder had one.
class Channel {
 public:
  Channel(ChoiMatrix choi, std::string label, std::optional<KrausSet> kraus = std::nullopt);

  int dim() const { return choi_.dim; }
  const ChoiMatrix& choi() const { return choi_; }
  const std::optional<KrausSet>& kraus() const { return kraus_; }
  const std::string& label() const { return label_; }

  /// χ in the given basis (Weyl by default).
  ProcessMatrix chi(std::shared_ptr<const OperatorBasis> basis = nullptr) const;

 private:
  ChoiMatrix choi_;
  std::optional<KrausSet> kraus_;
  std::string label_;
};

ChoiMatrix kraus_to_choi(const KrausSet& k);
ProcessMatrix choi_to_chi(const ChoiMatrix& c, std::shared_ptr<const OperatorBasis> basis);
ChoiMatrix chi_to_choi(const ProcessMatrix& p);
/// Eigendecomposition Kraus operators; eigenvalues below 1e-12 are dropped
/// and each operator's largest entry is made real positive.
KrausSet choi_to_kraus(const ChoiMatrix& c);

/// E(ρ) = d Tr_in[(ρ^T ⊗ I) ρ_E].
Matrix apply(const Channel& channel, const Matrix& rho_in);
Matrix apply(const ChoiMatrix& choi, const Matrix& rho_in);
/// Σ K ρ K^†, used as an independent route in tests.
Matrix apply(const KrausSet& kraus, const Matrix& rho_in);

Channel identity_channel(int d);
/// ρ -> pρ + (1-p) I/d with pure-state fidelity F, p = (dF-1)/(d-1).
Channel depolarizing_with_fidelity(int d, double fidelity);
/// Universal symmetric cloner output: depolarizing at F = 1/2 + 1/(1+d).
Channel optimal_cloning_channel(int d);
double cloning_fidelity(int d);
/// Eve measures in a basis drawn uniformly from `bases` (1-based labels) and
/// resends the outcome.
Channel intercept_resend_channel(const MubFamily& mubs, const std::vector<int>& bases);
double intercept_resend_fidelity(int d);
/// Diagonal χ in the Weyl basis. Keys are operator indices 0..d^2-1.
Channel diagonal_chi_channel(int d, const std::map<int, double>& weights);

/// Diagonal weights of the symmetric full-rank model at fidelity F:
/// χ_00 = ((d+1)F - 1)/d, (1-F)/(d(d-1)) elsewhere.
std::map<int, double> symmetric_chi_weights(int d, double fidelity);

struct ChannelReport {
  double min_choi_eigenvalue = 0.0;
  double tp_deviation = 0.0;  // ||d Tr_out ρ_E - I||_max

  bool cp_ok(double tol = 1e-10) const { return min_choi_eigenvalue >= -tol; }
  bool tp_ok(double tol = 1e-8) const { return tp_deviation <= tol; }
};

ChannelReport validate_channel(const ChoiMatrix& c);
ChannelReport validate_channel(const Channel& c);

/// |Φ><Φ| for C^d ⊗ C^d.
Matrix maximally_entangled(int d);

}  // namespace qpt

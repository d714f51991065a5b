#pragma once

#include <string>
#include <vector>

#include "qpt/linalg.hpp"

namespace qpt {

/// A normalized state vector of a d-level system.
struct PureState {
  Vector amplitudes;

  int dim() const { return static_cast<int>(amplitudes.size()); }
};

/// The d+1 mutually unbiased bases of C^d. Basis and state labels are
/// 1-based: alpha in 1..d+1, m in 1..d. Basis 1 is the computational basis.
class MubFamily {
 public:
  MubFamily(int dim, std::vector<std::vector<PureState>> bases);

  int dim() const { return dim_; }
  int num_bases() const { return static_cast<int>(bases_.size()); }

  const PureState& state(int alpha, int m) const;
  const std::vector<PureState>& basis(int alpha) const;
  const std::vector<std::vector<PureState>>& bases() const { return bases_; }

  /// Signed OAM label of computational state m, as used for display in
  /// photonic experiments: -d/2..d/2 skipping 0 for even d, symmetric
  /// around 0 for odd d. Has no effect on any computation.
  int oam_label(int m) const;

 private:
  void check_index(int alpha, int m) const;

  int dim_;
  std::vector<std::vector<PureState>> bases_;
};

/// Builds the complete MUB set for prime d or d = 4. For prime d the second
/// basis is the discrete Fourier basis; for d = 4 it is the Walsh-Hadamard
/// basis of the GF(4) construction.
MubFamily generate_mubs(int d);

/// |psi_m^(alpha)><psi_m^(alpha)|.
Matrix projector(const MubFamily& family, int alpha, int m);

struct MubReport {
  double orthonormality = 0.0;  // max | |<m|n>|^2 - delta_mn |, same basis
  double unbiasedness = 0.0;    // max | |<m|n>|^2 - 1/d |, distinct bases
  double completeness = 0.0;    // max | sum Pi / (d+1) - I |
  double tolerance = 1e-10;

  bool orthonormal_ok() const { return orthonormality < tolerance; }
  bool unbiased_ok() const { return unbiasedness < tolerance; }
  bool complete_ok() const { return completeness < tolerance; }
  bool ok() const { return orthonormal_ok() && unbiased_ok() && complete_ok(); }
};

MubReport verify_mubs(const MubFamily& family, double tolerance = 1e-10);

bool is_prime(int n);

}  // namespace qpt

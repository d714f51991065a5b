#pragma once

#include "qpt/linalg.hpp"

namespace qpt::kernels {

// Hot loops of the forward model and the likelihood iteration, over a set of
// rank-1 POVM elements Π_j = v_j v_j^†. `vectors` holds v_j as row j.
//
// Each kernel has a serial reference and an OpenMP variant. The parallel
// variants keep the per-entry summation order of the reference, so results
// are reproducible for any thread count.

/// p_j = v_j^† ρ v_j.
RealVector born_probabilities_serial(const Matrix& vectors, const Matrix& rho);
RealVector born_probabilities(const Matrix& vectors, const Matrix& rho);

/// R = Σ_j w_j v_j v_j^†.
Matrix accumulate_operator_serial(const Matrix& vectors, const RealVector& weights);
Matrix accumulate_operator(const Matrix& vectors, const RealVector& weights);

/// Σ_j f_j log max(p_j, floor), skipping f_j = 0.
double log_likelihood_serial(const RealVector& freqs, const RealVector& probs, double floor = 1e-300);
double log_likelihood(const RealVector& freqs, const RealVector& probs, double floor = 1e-300);

int max_threads();

}  // namespace qpt::kernels

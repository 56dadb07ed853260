#pragma once

#include "mdl/numerics.hpp"
#include "mdl/scenario.hpp"

namespace mdl {

/// One batch of array observations together with the derived quantities the
/// detector consumes.
struct SnapshotSet {
  ComplexMatrix x;           // L x n observations
  ComplexMatrix sample_cov;  // (1/n) X X^H, Hermitian PSD
  RealVector sample_eigs;    // descending, >= 0
};

/// Source waveform matrix S (d x n) for the deterministic signal model.
/// Rows start as unit-modulus random-phase sequences and are then whitened
/// against their own sample Gram matrix and rescaled by P^{1/2}, so that
/// (1/n) S S^H = P holds exactly, matching the population covariance of the
/// stochastic model at every n. Requires n >= d.
ComplexMatrix deterministic_source_matrix(const SourceSet& sources, int n, RngStream& rng);

/// (1/n) X X^H. Throws on an empty snapshot matrix.
ComplexMatrix sample_covariance(const ComplexMatrix& x);

/// Draws X = A S + V under the scenario's signal model and forms the sample
/// covariance and its sorted eigenvalues. Under the deterministic model the
/// source matrix is drawn fresh from `rng`; callers that condition on one
/// waveform realization should use generate_snapshots_fixed_signal.
SnapshotSet generate_snapshots(const Scenario& s, RngStream& rng);

/// Noise-only draw around a fixed source matrix: X = A * source_matrix + V.
/// `source_matrix` must be d x n.
SnapshotSet generate_snapshots_fixed_signal(const Scenario& s,
                                            const ComplexMatrix& source_matrix,
                                            RngStream& rng);

}  // namespace mdl

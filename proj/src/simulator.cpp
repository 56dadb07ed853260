#include "mdl/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace mdl {

namespace {

SnapshotSet finish_snapshot_set(ComplexMatrix x) {
  SnapshotSet out;
  out.sample_cov = sample_covariance(x);
  out.sample_eigs = hermitian_eigenvalues(out.sample_cov);
  out.x = std::move(x);
  // Rounding can push trailing eigenvalues a hair below zero.
  const double floor_tol = 1e-12 * std::max(out.sample_eigs[0], 0.0);
  for (Eigen::Index i = 0; i < out.sample_eigs.size(); ++i) {
    if (out.sample_eigs[i] < 0.0 && out.sample_eigs[i] > -floor_tol) {
      out.sample_eigs[i] = 0.0;
    }
  }
  return out;
}

ComplexMatrix noise_matrix(int sensors, int n, double noise_var, RngStream& rng) {
  ComplexMatrix v(sensors, n);
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < sensors; ++i) {
      v(i, t) = rng.complex_normal(noise_var);
    }
  }
  return v;
}

}  // namespace

ComplexMatrix deterministic_source_matrix(const SourceSet& sources, int n, RngStream& rng) {
  const int d = sources.count();
  if (n < d) {
    throw std::invalid_argument(
        "deterministic_source_matrix: need n >= d to satisfy the Gram constraint");
  }
  if (d == 0) {
    return ComplexMatrix(0, n);
  }
  ComplexMatrix s0(d, n);
  for (int t = 0; t < n; ++t) {
    for (int k = 0; k < d; ++k) {
      s0(k, t) = rng.unit_phase();
    }
  }
  // Whiten against the sample Gram, then scale rows to the requested powers.
  const ComplexMatrix gram = (s0 * s0.adjoint()) / static_cast<double>(n);
  const EigenPair eig = hermitian_eigensolve(gram);
  if (eig.values[d - 1] <= 1e-12) {
    throw std::runtime_error("deterministic_source_matrix: degenerate phase matrix draw");
  }
  ComplexMatrix gram_inv_sqrt =
      eig.vectors * eig.values.cwiseSqrt().cwiseInverse().asDiagonal() * eig.vectors.adjoint();
  ComplexMatrix s = gram_inv_sqrt * s0;
  for (int k = 0; k < d; ++k) {
    s.row(k) *= std::sqrt(sources.powers[k]);
  }
  return s;
}

ComplexMatrix sample_covariance(const ComplexMatrix& x) {
  if (x.cols() < 1 || x.rows() < 1) {
    throw std::invalid_argument("sample_covariance: empty snapshot matrix");
  }
  ComplexMatrix r = (x * x.adjoint()) / static_cast<double>(x.cols());
  return 0.5 * (r + r.adjoint());
}

SnapshotSet generate_snapshots(const Scenario& s, RngStream& rng) {
  s.validate();
  const int L = s.array.sensors;
  const int n = s.snapshots;
  const int d = s.sources.count();

  ComplexMatrix x;
  if (d == 0) {
    x = noise_matrix(L, n, s.noise_var, rng);
  } else if (s.model == SignalModel::kStochastic) {
    ComplexMatrix sig(d, n);
    for (int t = 0; t < n; ++t) {
      for (int k = 0; k < d; ++k) {
        sig(k, t) = rng.complex_normal(s.sources.powers[k]);
      }
    }
    x = steering_matrix(s.sources, L) * sig;
    x += noise_matrix(L, n, s.noise_var, rng);
  } else {
    const ComplexMatrix sig = deterministic_source_matrix(s.sources, n, rng);
    x = steering_matrix(s.sources, L) * sig;
    x += noise_matrix(L, n, s.noise_var, rng);
  }
  return finish_snapshot_set(std::move(x));
}

SnapshotSet generate_snapshots_fixed_signal(const Scenario& s,
                                            const ComplexMatrix& source_matrix,
                                            RngStream& rng) {
  s.validate();
  const int L = s.array.sensors;
  const int n = s.snapshots;
  if (source_matrix.rows() != s.sources.count() || source_matrix.cols() != n) {
    throw std::invalid_argument("generate_snapshots_fixed_signal: source matrix must be d x n");
  }
  ComplexMatrix x = noise_matrix(L, n, s.noise_var, rng);
  if (source_matrix.rows() > 0) {
    x.noalias() += steering_matrix(s.sources, L) * source_matrix;
  }
  return finish_snapshot_set(std::move(x));
}

}  // namespace mdl

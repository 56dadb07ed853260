#pragma once

#include <vector>

#include "mdl/numerics.hpp"

namespace mdl {

enum class SignalModel { kStochastic, kDeterministic };

/// Uniform linear array with half-wavelength inter-element spacing.
/// Other geometries are out of scope.
struct ArrayConfig {
  int sensors = 0;
};

/// Uncorrelated narrowband point sources. `powers[k]` is the variance of
/// source k (the diagonal of the source covariance).
struct SourceSet {
  std::vector<double> doas_deg;
  std::vector<double> powers;

  int count() const { return static_cast<int>(doas_deg.size()); }
};

struct Scenario {
  ArrayConfig array;
  SourceSet sources;
  int snapshots = 0;
  double noise_var = 1.0;
  SignalModel model = SignalModel::kStochastic;

  /// Throws std::invalid_argument on any violated field constraint.
  void validate() const;
};

/// Exact eigenvalues of the population covariance, sorted descending.
/// The trailing `lambdas.size() - d` entries equal sigma2 (to 1e-9 relative).
struct PopulationSpectrum {
  RealVector lambdas;
  double sigma2 = 0.0;
  int d = 0;
};

/// Array response a(theta): element k = exp(i pi k sin theta), k = 0..L-1.
/// Requires |theta_deg| < 90.
ComplexVector steering_vector(double theta_deg, int sensors);

/// L x d matrix of steering vectors, one column per source.
ComplexMatrix steering_matrix(const SourceSet& sources, int sensors);

/// R = A P A^H + sigma^2 I. Identical for both signal models by the
/// equal-second-order-statistics convention.
ComplexMatrix population_covariance(const Scenario& s);

PopulationSpectrum population_spectrum(const Scenario& s);

/// Per-source power for a sensor SNR in dB: power = noise_var * 10^(snr/10).
double power_from_snr_db(double snr_db, double noise_var);

}  // namespace mdl

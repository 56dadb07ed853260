#include "mdl/scenario.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mdl {

namespace {
constexpr double kNoiseEigRelTol = 1e-9;
}

void Scenario::validate() const {
  if (array.sensors < 2) {
    throw std::invalid_argument("scenario: sensor count must be >= 2");
  }
  const int d = sources.count();
  if (static_cast<int>(sources.powers.size()) != d) {
    throw std::invalid_argument("scenario: doas_deg and powers must have equal length");
  }
  if (d >= array.sensors) {
    throw std::invalid_argument("scenario: source count must be < sensor count");
  }
  for (int i = 0; i < d; ++i) {
    if (!(std::abs(sources.doas_deg[i]) < 90.0)) {
      throw std::invalid_argument("scenario: DOAs must satisfy |theta| < 90 degrees");
    }
    if (!(sources.powers[i] > 0.0)) {
      throw std::invalid_argument("scenario: source powers must be positive");
    }
    for (int j = i + 1; j < d; ++j) {
      if (sources.doas_deg[i] == sources.doas_deg[j]) {
        throw std::invalid_argument("scenario: DOAs must be pairwise distinct");
      }
    }
  }
  if (snapshots < 1) {
    throw std::invalid_argument("scenario: snapshot count must be >= 1");
  }
  if (!(noise_var > 0.0)) {
    throw std::invalid_argument("scenario: noise variance must be positive");
  }
}

ComplexVector steering_vector(double theta_deg, int sensors) {
  if (sensors < 2) {
    throw std::invalid_argument("steering_vector: sensor count must be >= 2");
  }
  if (!(std::abs(theta_deg) < 90.0)) {
    throw std::invalid_argument("steering_vector: |theta| < 90 degrees required");
  }
  const double phase_step = std::numbers::pi * std::sin(theta_deg * std::numbers::pi / 180.0);
  ComplexVector a(sensors);
  for (int k = 0; k < sensors; ++k) {
    a[k] = Complex(std::cos(phase_step * k), std::sin(phase_step * k));
  }
  return a;
}

ComplexMatrix steering_matrix(const SourceSet& sources, int sensors) {
  ComplexMatrix a(sensors, sources.count());
  for (int k = 0; k < sources.count(); ++k) {
    a.col(k) = steering_vector(sources.doas_deg[k], sensors);
  }
  return a;
}

ComplexMatrix population_covariance(const Scenario& s) {
  s.validate();
  const int L = s.array.sensors;
  ComplexMatrix r = s.noise_var * ComplexMatrix::Identity(L, L);
  if (s.sources.count() > 0) {
    const ComplexMatrix a = steering_matrix(s.sources, L);
    for (int k = 0; k < s.sources.count(); ++k) {
      r.noalias() += s.sources.powers[k] * (a.col(k) * a.col(k).adjoint());
    }
  }
  return 0.5 * (r + r.adjoint());
}

PopulationSpectrum population_spectrum(const Scenario& s) {
  PopulationSpectrum spec;
  spec.lambdas = hermitian_eigenvalues(population_covariance(s));
  spec.sigma2 = s.noise_var;
  spec.d = s.sources.count();
  const int L = s.array.sensors;
  for (int i = spec.d; i < L; ++i) {
    if (std::abs(spec.lambdas[i] - spec.sigma2) > kNoiseEigRelTol * spec.sigma2) {
      throw std::runtime_error("population_spectrum: trailing eigenvalues deviate from sigma^2");
    }
  }
  return spec;
}

double power_from_snr_db(double snr_db, double noise_var) {
  return noise_var * std::pow(10.0, snr_db / 10.0);
}

}  // namespace mdl

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace mdl {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
/// descending; column i of `vectors` pairs with `values[i]`.
struct EigenPair {
  RealVector values;
  ComplexMatrix vectors;
};

/// Dense Hermitian eigensolver. The input must be square and Hermitian to
/// 1e-10 relative Frobenius norm, otherwise std::invalid_argument is thrown.
/// Eigenvalues are real and returned non-increasing; exact ties keep the
/// backend's deterministic order.
EigenPair hermitian_eigensolve(const ComplexMatrix& m);

/// Eigenvalues only (descending). Same input contract as hermitian_eigensolve.
RealVector hermitian_eigenvalues(const ComplexMatrix& m);

/// Seeded, counter-addressed RNG stream. A (seed, stream_id) pair fully
/// determines the sample sequence, independent of thread scheduling, so
/// parallel trials derive disjoint stream ids instead of sharing a generator.
/// All variates are produced from raw 64-bit draws (Box-Muller for normals),
/// never from implementation-defined library distributions, so sequences are
/// reproducible bit for bit.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_positive();

  /// Standard real Gaussian.
  double normal();

  /// Circular complex Gaussian with E|z|^2 = variance (real and imaginary
  /// parts independent N(0, variance/2)).
  Complex complex_normal(double variance);

  /// Uniform phase point exp(i 2 pi U) on the unit circle.
  Complex unit_phase();

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// mean + circular complex Gaussian noise vector with E(v v^H) = variance * I.
/// Throws std::invalid_argument if variance <= 0.
ComplexVector sample_circular_gaussian(const ComplexVector& mean, double variance,
                                       RngStream& rng);

/// Upper Gaussian tail Q(t) = integral_t^inf exp(-u^2/2)/sqrt(2 pi) du.
double gaussian_q(double t);

}  // namespace mdl

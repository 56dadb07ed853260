#include "mdl/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mdl {

namespace {

constexpr double kHermitianRelTol = 1e-10;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
  // Decorrelate (seed, stream_id) pairs before seeding the engine.
  std::uint64_t state = seed ^ (stream_id * 0xD2B74407B1CE6E93ull + 0x9E3779B97F4A7C15ull);
  std::uint64_t w0 = splitmix64(state);
  std::uint64_t w1 = splitmix64(state);
  std::uint64_t w2 = splitmix64(state);
  std::uint64_t w3 = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(w0), static_cast<std::uint32_t>(w0 >> 32),
                    static_cast<std::uint32_t>(w1), static_cast<std::uint32_t>(w1 >> 32),
                    static_cast<std::uint32_t>(w2), static_cast<std::uint32_t>(w2 >> 32),
                    static_cast<std::uint32_t>(w3), static_cast<std::uint32_t>(w3 >> 32)};
  gen_.seed(seq);
}

std::uint64_t RngStream::next_u64() { return gen_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_positive() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_positive()));
  const double phi = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

Complex RngStream::complex_normal(double variance) {
  // One Box-Muller pair per complex draw; E|z|^2 = variance.
  const double r = std::sqrt(-variance * std::log(uniform_positive()));
  const double phi = 2.0 * std::numbers::pi * uniform();
  return {r * std::cos(phi), r * std::sin(phi)};
}

Complex RngStream::unit_phase() {
  const double phi = 2.0 * std::numbers::pi * uniform();
  return {std::cos(phi), std::sin(phi)};
}

EigenPair hermitian_eigensolve(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("hermitian_eigensolve: matrix must be square and non-empty");
  }
  const double scale = m.norm();
  if ((m - m.adjoint()).norm() > kHermitianRelTol * std::max(scale, 1e-300)) {
    throw std::invalid_argument("hermitian_eigensolve: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (m + m.adjoint()));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eigensolve: eigensolver did not converge");
  }
  const Eigen::Index n = m.rows();
  EigenPair out;
  out.values = solver.eigenvalues().reverse();
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("hermitian_eigenvalues: matrix must be square and non-empty");
  }
  const double scale = m.norm();
  if ((m - m.adjoint()).norm() > kHermitianRelTol * std::max(scale, 1e-300)) {
    throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (m + m.adjoint()),
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eigenvalues: eigensolver did not converge");
  }
  return solver.eigenvalues().reverse();
}

ComplexVector sample_circular_gaussian(const ComplexVector& mean, double variance,
                                       RngStream& rng) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("sample_circular_gaussian: variance must be positive");
  }
  ComplexVector out(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    out[i] = mean[i] + rng.complex_normal(variance);
  }
  return out;
}

double gaussian_q(double t) {
  return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

}  // namespace mdl

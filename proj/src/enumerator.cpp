#include "mdl/enumerator.hpp"

#include <cmath>
#include <stdexcept>

namespace mdl {

namespace {

void check_spectrum(const RealVector& eigs, int d) {
  const int L = static_cast<int>(eigs.size());
  if (L < 1) {
    throw std::invalid_argument("enumerator: empty spectrum");
  }
  if (d < 0 || d >= L) {
    throw std::invalid_argument("enumerator: order d must satisfy 0 <= d <= L-1");
  }
  for (int i = 1; i < L; ++i) {
    if (eigs[i] > eigs[i - 1]) {
      throw std::invalid_argument("enumerator: eigenvalues must be sorted descending");
    }
  }
}

double mean_log_tail(const RealVector& eigs, int d) {
  const int L = static_cast<int>(eigs.size());
  double acc = 0.0;
  for (int i = d; i < L; ++i) {
    if (!(eigs[i] > 0.0)) {
      throw std::domain_error("enumerator: degenerate spectrum, tail eigenvalue <= 0");
    }
    acc += std::log(eigs[i]);
  }
  return acc / static_cast<double>(L - d);
}

double sphericity_term(const RealVector& eigs, int d) {
  const double a = arithmetic_mean_tail(eigs, d);
  return std::max(0.0, std::log(a) - mean_log_tail(eigs, d));
}

double penalty_term(int d, int L, int n) {
  return 0.5 * static_cast<double>(d) * static_cast<double>(2 * L - d) *
         std::log(static_cast<double>(n));
}

}  // namespace

double arithmetic_mean_tail(const RealVector& eigs, int d) {
  check_spectrum(eigs, d);
  const int L = static_cast<int>(eigs.size());
  double acc = 0.0;
  for (int i = d; i < L; ++i) {
    acc += eigs[i];
  }
  return acc / static_cast<double>(L - d);
}

double geometric_mean_tail(const RealVector& eigs, int d) {
  check_spectrum(eigs, d);
  return std::exp(mean_log_tail(eigs, d));
}

double mdl_criterion(const RealVector& eigs, int d, int n) {
  check_spectrum(eigs, d);
  if (n < 2) {
    throw std::invalid_argument("mdl_criterion: n must be >= 2");
  }
  const int L = static_cast<int>(eigs.size());
  return static_cast<double>(n) * static_cast<double>(L - d) * sphericity_term(eigs, d) +
         penalty_term(d, L, n);
}

MdlResult estimate_d(const RealVector& eigs, int n) {
  check_spectrum(eigs, 0);
  if (n < 2) {
    throw std::invalid_argument("estimate_d: n must be >= 2");
  }
  const int L = static_cast<int>(eigs.size());
  MdlResult res;
  res.criterion.resize(L);
  res.arith_mean.resize(L);
  res.geom_mean.resize(L);

  // Running tail sums from the right keep the scan O(L).
  double tail_sum = 0.0;
  double tail_log_sum = 0.0;
  RealVector sums(L), log_sums(L);
  for (int i = L - 1; i >= 0; --i) {
    if (!(eigs[i] > 0.0)) {
      throw std::domain_error("estimate_d: degenerate spectrum, tail eigenvalue <= 0");
    }
    tail_sum += eigs[i];
    tail_log_sum += std::log(eigs[i]);
    sums[i] = tail_sum;
    log_sums[i] = tail_log_sum;
  }

  res.d_hat = 0;
  for (int d = 0; d < L; ++d) {
    const double count = static_cast<double>(L - d);
    const double a = sums[d] / count;
    const double mean_log = log_sums[d] / count;
    res.arith_mean[d] = a;
    res.geom_mean[d] = std::exp(mean_log);
    const double data = std::max(0.0, std::log(a) - mean_log);
    res.criterion[d] = static_cast<double>(n) * count * data + penalty_term(d, L, n);
    if (res.criterion[d] < res.criterion[res.d_hat]) {
      res.d_hat = d;
    }
  }
  return res;
}

}  // namespace mdl

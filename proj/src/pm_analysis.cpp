#include "mdl/pm_analysis.hpp"

#include <cmath>
#include <limits>

#include "mdl/eigstats.hpp"
#include "mdl/numerics.hpp"

namespace mdl {

namespace {

constexpr double kResidualTarget = 1e-13;
constexpr int kMaxIterations = 100;

double log_q_derivative(double x, int m) {
  return (m - 1) * (x - 1.0) / (x * (m + x - 1.0));
}

}  // namespace

double threshold_T(int d, int sensors, int n) {
  if (d < 1 || d > sensors - 1) {
    throw std::invalid_argument("threshold_T: require 1 <= d <= L-1");
  }
  if (n < 2) {
    throw std::invalid_argument("threshold_T: n must be >= 2");
  }
  return static_cast<double>(2 * sensors - 2 * d + 1) * std::log(static_cast<double>(n)) /
         (2.0 * static_cast<double>(n));
}

double log_Q(double x, int d, int sensors) {
  if (!(x > 0.0)) {
    throw std::invalid_argument("log_Q: x must be positive");
  }
  if (d < 1 || d > sensors - 1) {
    throw std::invalid_argument("log_Q: require 1 <= d <= L-1");
  }
  const double m = static_cast<double>(sensors - d + 1);
  return m * std::log1p((x - 1.0) / m) - std::log(x);
}

ThresholdSolution solve_threshold_x(int d, int sensors, int n) {
  if (sensors < 3 || d < 1 || d > sensors - 2) {
    throw std::invalid_argument("solve_threshold_x: require L >= 3 and 1 <= d <= L-2");
  }
  const double target = threshold_T(d, sensors, n);
  const int m = sensors - d + 1;

  ThresholdSolution sol;
  sol.d = d;
  sol.log_threshold = target;

  double x = 1.0 + std::sqrt(std::expm1(2.0 * target));
  double residual = std::abs(log_Q(x, d, sensors) - target);
  int it = 0;
  while (residual > kResidualTarget && it < kMaxIterations) {
    const double f = log_Q(x, d, sensors) - target;
    const double fp = log_q_derivative(x, m);
    double next = x - f / fp;
    if (!(next > 1.0) || !std::isfinite(next)) {
      next = 0.5 * (x + 1.0);
    }
    x = next;
    residual = std::abs(log_Q(x, d, sensors) - target);
    ++it;
  }

  if (residual > 1e-12) {
    // Bisection fallback: log_Q is increasing on x > 1, so bracket upward.
    double lo = 1.0 + 1e-12;
    double hi = 2.0;
    while (log_Q(hi, d, sensors) < target && hi < 1e12) {
      hi *= 2.0;
    }
    if (log_Q(hi, d, sensors) < target) {
      throw SolverFailure("solve_threshold_x: could not bracket the fixed point");
    }
    for (int b = 0; b < 200 && residual > kResidualTarget; ++b) {
      const double mid = 0.5 * (lo + hi);
      if (log_Q(mid, d, sensors) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
      x = 0.5 * (lo + hi);
      residual = std::abs(log_Q(x, d, sensors) - target);
      ++it;
    }
    if (residual > 1e-12) {
      throw SolverFailure("solve_threshold_x: residual " + std::to_string(residual) +
                          " after " + std::to_string(it) + " iterations");
    }
  }

  sol.x_threshold = x;
  sol.residual = residual;
  sol.iterations = it;
  return sol;
}

HypothesisStats hypothesis_stats(const PopulationSpectrum& spectrum, int n, int d) {
  const int L = static_cast<int>(spectrum.lambdas.size());
  if (d < 1 || d > L - 1) {
    throw std::invalid_argument("hypothesis_stats: require 1 <= d <= L-1");
  }
  if (n < 2) {
    throw std::invalid_argument("hypothesis_stats: n must be >= 2");
  }
  const double s2 = spectrum.sigma2;
  const double floor = kEigSeparationFloor * s2;
  const double lam_d = spectrum.lambdas[d - 1];
  if (lam_d - s2 <= floor) {
    throw std::domain_error("hypothesis_stats: lambda_d must exceed sigma^2");
  }

  HypothesisStats st;
  st.mean_ld = lam_d + static_cast<double>(L - d) * lam_d * s2 / (n * (lam_d - s2));
  for (int j = 0; j < d - 1; ++j) {
    const double lam_j = spectrum.lambdas[j];
    if (lam_j - lam_d <= floor) {
      throw std::domain_error("hypothesis_stats: signal eigenvalues not separated");
    }
    st.mean_ld -= lam_j * lam_d / (n * (lam_j - lam_d));
  }
  st.std_ld = lam_d / std::sqrt(static_cast<double>(n));
  st.mean_ad = s2;
  for (int j = 0; j < d; ++j) {
    st.mean_ad -= s2 * spectrum.lambdas[j] / (n * (spectrum.lambdas[j] - s2));
  }
  return st;
}

PmPrediction pm_predict_with_options(const PopulationSpectrum& spectrum, int n, int d,
                                     const PmOptions& options) {
  const int L = static_cast<int>(spectrum.lambdas.size());
  if (d < 1 || d > L - 2) {
    throw std::invalid_argument("pm_predict: require 1 <= d <= L-2");
  }

  PmPrediction pred;
  pred.d = d;

  const ThresholdSolution threshold = solve_threshold_x(d, L, n);
  if (options.taylor_threshold) {
    const double m = static_cast<double>(L - d + 1);
    pred.x_threshold = 1.0 + std::sqrt(2.0 * m * threshold.log_threshold / (m - 1.0));
  } else {
    pred.x_threshold = threshold.x_threshold;
  }

  const double s2 = spectrum.sigma2;
  const double lam_d = spectrum.lambdas[d - 1];

  if (options.include_biases) {
    const double floor = kEigSeparationFloor * s2;
    bool in_region = lam_d - s2 > floor;
    for (int j = 0; in_region && j < d - 1; ++j) {
      in_region = spectrum.lambdas[j] - lam_d > floor;
    }
    if (in_region) {
      const HypothesisStats st = hypothesis_stats(spectrum, n, d);
      in_region = st.mean_ad > 0.0;
      if (in_region) {
        pred.mean_ld = st.mean_ld;
        pred.std_ld = st.std_ld;
        pred.mean_ad = st.mean_ad;
      }
    }
    if (!in_region) {
      pred.valid = false;
      pred.p_miss = 1.0;
      return pred;
    }
  } else {
    if (!(lam_d > s2)) {
      pred.valid = false;
      pred.p_miss = 1.0;
      return pred;
    }
    pred.mean_ld = lam_d;
    pred.std_ld = lam_d / std::sqrt(static_cast<double>(n));
    pred.mean_ad = s2;
  }

  pred.mu_x = pred.mean_ld / pred.mean_ad;
  pred.sigma_x = pred.std_ld / pred.mean_ad;
  pred.p_miss = 1.0 - gaussian_q((pred.x_threshold - pred.mu_x) / pred.sigma_x);
  pred.p_miss = std::min(1.0, std::max(0.0, pred.p_miss));
  return pred;
}

PmPrediction pm_predict(const PopulationSpectrum& spectrum, int n, int d) {
  return pm_predict_with_options(spectrum, n, d, PmOptions{});
}

PmPrediction pm_wang_baseline(const PopulationSpectrum& spectrum, int n, int d) {
  const int L = static_cast<int>(spectrum.lambdas.size());
  if (d < 1 || d > L - 2) {
    throw std::invalid_argument("pm_wang_baseline: require 1 <= d <= L-2");
  }

  PmPrediction pred;
  pred.d = d;

  const double m = static_cast<double>(L - d + 1);
  const double t = threshold_T(d, L, n);
  pred.x_threshold = 1.0 + std::sqrt(2.0 * m * t / (m - 1.0));

  const double s2 = spectrum.sigma2;
  const double lam_d = spectrum.lambdas[d - 1];
  if (!(lam_d > s2)) {
    pred.valid = false;
    pred.p_miss = 1.0;
    return pred;
  }
  pred.mean_ld = lam_d;
  pred.std_ld = lam_d / std::sqrt(static_cast<double>(n));
  pred.mean_ad = s2;
  pred.mu_x = pred.mean_ld / pred.mean_ad;
  pred.sigma_x = pred.std_ld / pred.mean_ad;
  pred.p_miss = 1.0 - gaussian_q((pred.x_threshold - pred.mu_x) / pred.sigma_x);
  pred.p_miss = std::min(1.0, std::max(0.0, pred.p_miss));
  return pred;
}

double fishler_mu(double lambda_d, double sigma2, int sensors, int d, int n) {
  if (!(lambda_d > 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("fishler_mu: lambda_d and sigma2 must be positive");
  }
  const double m = static_cast<double>(sensors - d + 1);
  const double bracket = 1.0 + (lambda_d / sigma2 - 1.0) / m;
  return static_cast<double>(n) * std::log(sigma2 / lambda_d * std::pow(bracket, m)) +
         0.5 * static_cast<double>(2 * d - 2 * sensors - 1) * std::log(static_cast<double>(n));
}

}  // namespace mdl

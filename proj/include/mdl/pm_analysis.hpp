#pragma once

#include <limits>
#include <stdexcept>

#include "mdl/scenario.hpp"

namespace mdl {

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solved eigen-ratio detection threshold for hypothesis order d.
struct ThresholdSolution {
  int d = 0;
  double log_threshold = 0.0;  // T_d, log-domain penalty delta
  double x_threshold = 0.0;    // T_x > 1 with log_Q(T_x) = T_d
  double residual = 0.0;       // |log_Q(T_x) - T_d| at return
  int iterations = 0;
};

/// Analytic missed-detection prediction at one operating point.
struct PmPrediction {
  double snr_db = std::numeric_limits<double>::quiet_NaN();  // filled by the harness
  int d = 0;
  double mu_x = 0.0;     // mean of x = l_d / a_d
  double sigma_x = 0.0;  // std of x
  double x_threshold = 0.0;
  double p_miss = 0.0;
  double mean_ld = 0.0;
  double std_ld = 0.0;
  double mean_ad = 0.0;
  /// False when the operating point is outside the predictor's region
  /// (lambda_d <= sigma^2, or bias sums ill-conditioned); p_miss is then the
  /// sentinel value 1.
  bool valid = true;
};

/// Log-domain decision threshold T_d = (2L - 2d + 1) log(n) / (2n), the
/// penalty delta of the criterion between orders d-1 and d.
/// Requires 1 <= d <= L-1, n >= 2.
double threshold_T(int d, int sensors, int n);

/// log Q_md(x) = m log(1 + (x-1)/m) - log(x) with m = L - d + 1.
/// Zero at x = 1 and strictly increasing for x > 1. Requires x > 0.
double log_Q(double x, int d, int sensors);

/// Solves log_Q(x) = T_d for the eigen-ratio threshold x > 1. Newton steps
/// with the exact derivative (m-1)(x-1) / (x (m + x - 1)) from the starting
/// point 1 + sqrt(e^{2T} - 1), with a bisection fallback; only the fixed
/// point is normative. Throws SolverFailure if the residual cannot be driven
/// to 1e-12 within 100 iterations. Requires 1 <= d <= L-2 and L >= 3.
ThresholdSolution solve_threshold_x(int d, int sensors, int n);

/// First-order statistics of l_d and a_d under hypothesis order d:
///   E(l_d)   = lambda_d + (L-d) lambda_d s2 / (n (lambda_d - s2))
///              - sum_{j<d} lambda_j lambda_d / (n (lambda_j - lambda_d))
///   Std(l_d) = lambda_d / sqrt(n)
///   E(a_d)   = s2 - sum_{j<=d} s2 lambda_j / (n (lambda_j - s2))
struct HypothesisStats {
  double mean_ld = 0.0;
  double std_ld = 0.0;
  double mean_ad = 0.0;
};

/// Throws std::domain_error when lambda_d <= sigma^2 or the signal
/// eigenvalues are not separated (see kEigSeparationFloor).
HypothesisStats hypothesis_stats(const PopulationSpectrum& spectrum, int n, int d);

/// Switchboard shared by the proposed predictor and the reconstructed
/// baseline: optionally drop the eigenvalue/noise-mean bias corrections and
/// swap the exact threshold for its small-x Taylor solution.
struct PmOptions {
  bool include_biases = true;
  bool taylor_threshold = false;
};

PmPrediction pm_predict_with_options(const PopulationSpectrum& spectrum, int n, int d,
                                     const PmOptions& options);

/// Proposed predictor: p_m = 1 - Q((T_x - mu_x) / sigma_x) with
/// mu_x = E(l_d)/E(a_d) and sigma_x = Std(l_d)/E(a_d); the a_d variance is
/// neglected. Out-of-region points return p_m = 1 with valid = false.
PmPrediction pm_predict(const PopulationSpectrum& spectrum, int n, int d);

/// Reconstruction of the earlier analysis for comparison: threshold from the
/// second-order Taylor expansion of log_Q at x = 1, x statistics without any
/// bias terms.
PmPrediction pm_wang_baseline(const PopulationSpectrum& spectrum, int n, int d);

/// Mean of the criterion difference Lambda(d-1) - Lambda(d) used by the
/// reference analysis it is compared against:
///   n log((s2/lambda_d) [1 + (lambda_d/s2 - 1)/(L-d+1)]^{L-d+1})
///     + (2d - 2L - 1) log(n) / 2
double fishler_mu(double lambda_d, double sigma2, int sensors, int d, int n);

}  // namespace mdl

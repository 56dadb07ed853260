#pragma once

#include <vector>

#include "mdl/numerics.hpp"
#include "mdl/scenario.hpp"

namespace mdl {

/// First-order (in 1/n) mean and variance of the sample eigenvalues, valid
/// for the well-separated signal indices only. Noise indices are flagged not
/// applicable; their behaviour is covered by the bulk/edge laws below.
struct EigMoments {
  RealVector mean;
  RealVector variance;
  std::vector<bool> applicable;       // true only for modelled signal indices
  std::vector<bool> ill_conditioned;  // separation floor violated at this index
  SignalModel model = SignalModel::kStochastic;
};

/// Covariance of two sesquilinear forms of the sample covariance,
/// Cov(alpha^H R_hat beta, gamma^H R_hat zeta), for observations with
/// per-snapshot covariance Sigma and mean matrix mu (L x n; pass an empty
/// matrix for the zero-mean case):
///
///   n^-1 (a^H S g)(z^H S b) + n^-2 (a^H M g)(z^H S b) + n^-2 (a^H S g)(z^H M b)
///
/// with S = Sigma and M = mu mu^H. The second argument of Cov is conjugated.
Complex brillinger_cov(const ComplexVector& alpha, const ComplexVector& beta,
                       const ComplexVector& gamma, const ComplexVector& zeta,
                       const ComplexMatrix& sigma, const ComplexMatrix& mu, int n);

/// Signal-eigenvalue moments under the stochastic (zero-mean Gaussian) model:
///   E(l_i)   = lambda_i + sum_{j != i} lambda_i lambda_j / (n (lambda_i - lambda_j))
///   Var(l_i) = lambda_i^2 / n
EigMoments stochastic_eig_moments(const PopulationSpectrum& spectrum, int n);

/// Same for the deterministic (conditional) signal model:
///   E(l_i)   = lambda_i + sum_{j != i} ((lambda_i + lambda_j) s2 - s2^2) / (n (lambda_i - lambda_j))
///   Var(l_i) = (2 lambda_i s2 - s2^2) / n
EigMoments deterministic_eig_moments(const PopulationSpectrum& spectrum, int n);

/// Bias sums are evaluated only when |lambda_i - lambda_j| exceeds this
/// fraction of sigma^2; closer spacings flip the ill_conditioned flag
/// instead of producing a meaningless value.
inline constexpr double kEigSeparationFloor = 1e-6;

/// Bulk law of the null-case sample eigenvalues with ratio gamma = n / L:
/// support [(1 - gamma^-1/2)^2, (1 + gamma^-1/2)^2].
struct MpLaw {
  double gamma = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

MpLaw mp_law(double gamma);

/// Density gamma sqrt((b - l)(l - a)) / (2 pi l) on [a, b], zero outside.
double mp_density(double l, const MpLaw& law);

/// Integral of mp_density over (-inf, l], by quadrature on a substitution
/// that removes the square-root endpoint singularities.
double mp_cdf(double l, const MpLaw& law);

/// Two-moment approximation to the law of the largest null-case eigenvalue:
///   mu_nL  = (1 + sqrt(L/n))^2
///   s_nL   = sqrt(mu_nL / n) (n^-1/2 + L^-1/2)^(1/3)
///   mean   = mu_nL - 1.8 s_nL,  stddev = 0.9 s_nL
struct TwMoments {
  double mean = 0.0;
  double stddev = 0.0;
};

TwMoments tw_largest_moments(int n, int sensors);

/// First-order variances of the weakest signal eigenvalue when it sits at the
/// bulk upper edge lambda_d = sigma^2 (1 + sqrt(L/n))^2, under each model.
/// The two expressions are algebraically identical; both are returned so the
/// claim stays testable.
struct VarianceEquivalence {
  double var_stochastic = 0.0;
  double var_deterministic = 0.0;
  bool asymptotic_ok = true;  // false when L/n > 0.5
};

VarianceEquivalence variance_equivalence(int sensors, int n, double sigma2);

}  // namespace mdl

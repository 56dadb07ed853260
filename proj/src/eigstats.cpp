#include "mdl/eigstats.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace mdl {

namespace {

// Adaptive Simpson on a smooth integrand.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

EigMoments eig_moments_impl(const PopulationSpectrum& spectrum, int n, SignalModel model) {
  const int L = static_cast<int>(spectrum.lambdas.size());
  if (L < 2 || n < 2) {
    throw std::invalid_argument("eig_moments: need L >= 2 and n >= 2");
  }
  if (spectrum.d < 0 || spectrum.d >= L) {
    throw std::invalid_argument("eig_moments: spectrum order d out of range");
  }
  const double s2 = spectrum.sigma2;
  const double floor = kEigSeparationFloor * s2;

  EigMoments out;
  out.model = model;
  out.mean = RealVector::Zero(L);
  out.variance = RealVector::Zero(L);
  out.applicable.assign(L, false);
  out.ill_conditioned.assign(L, false);

  for (int i = 0; i < spectrum.d; ++i) {
    const double li = spectrum.lambdas[i];
    bool ok = true;
    double bias = 0.0;
    for (int j = 0; j < L; ++j) {
      if (j == i) continue;
      const double gap = li - spectrum.lambdas[j];
      if (std::abs(gap) <= floor) {
        ok = false;
        break;
      }
      if (model == SignalModel::kStochastic) {
        bias += li * spectrum.lambdas[j] / (n * gap);
      } else {
        bias += ((li + spectrum.lambdas[j]) * s2 - s2 * s2) / (n * gap);
      }
    }
    if (!ok) {
      out.ill_conditioned[i] = true;
      continue;
    }
    out.applicable[i] = true;
    out.mean[i] = li + bias;
    out.variance[i] =
        model == SignalModel::kStochastic ? li * li / n : (2.0 * li * s2 - s2 * s2) / n;
  }
  return out;
}

}  // namespace

Complex brillinger_cov(const ComplexVector& alpha, const ComplexVector& beta,
                       const ComplexVector& gamma, const ComplexVector& zeta,
                       const ComplexMatrix& sigma, const ComplexMatrix& mu, int n) {
  const Eigen::Index L = sigma.rows();
  if (sigma.cols() != L || alpha.size() != L || beta.size() != L || gamma.size() != L ||
      zeta.size() != L) {
    throw std::invalid_argument("brillinger_cov: dimension mismatch");
  }
  if (mu.size() > 0 && mu.rows() != L) {
    throw std::invalid_argument("brillinger_cov: mean matrix must have L rows");
  }
  if (n < 1) {
    throw std::invalid_argument("brillinger_cov: n must be >= 1");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const Complex asg = alpha.dot(sigma * gamma);  // Eigen's dot conjugates the left side
  const Complex zsb = zeta.dot(sigma * beta);
  Complex cov = inv_n * asg * zsb;
  if (mu.size() > 0) {
    const ComplexVector mu_g = mu * (mu.adjoint() * gamma);
    const ComplexVector mu_b = mu * (mu.adjoint() * beta);
    cov += inv_n * inv_n * (alpha.dot(mu_g) * zsb + asg * zeta.dot(mu_b));
  }
  return cov;
}

EigMoments stochastic_eig_moments(const PopulationSpectrum& spectrum, int n) {
  return eig_moments_impl(spectrum, n, SignalModel::kStochastic);
}

EigMoments deterministic_eig_moments(const PopulationSpectrum& spectrum, int n) {
  return eig_moments_impl(spectrum, n, SignalModel::kDeterministic);
}

MpLaw mp_law(double gamma) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("mp_law: gamma must be positive");
  }
  MpLaw law;
  law.gamma = gamma;
  const double root = 1.0 / std::sqrt(gamma);
  law.lower = (1.0 - root) * (1.0 - root);
  law.upper = (1.0 + root) * (1.0 + root);
  return law;
}

double mp_density(double l, const MpLaw& law) {
  if (!(l > law.lower) || !(l < law.upper)) {
    return 0.0;
  }
  return law.gamma / (2.0 * std::numbers::pi * l) * std::sqrt((law.upper - l) * (l - law.lower));
}

double mp_cdf(double l, const MpLaw& law) {
  if (l <= law.lower) return 0.0;
  // l = a + (b - a) sin^2(phi) turns the integrand into a bounded smooth
  // function of phi, so plain adaptive Simpson converges fast. The value at
  // the upper edge is the quadrature result, not a hard-coded 1, so the
  // normalization of the density stays observable.
  const double a = law.lower;
  const double width = law.upper - a;
  const double phi_end =
      l >= law.upper ? 0.5 * std::numbers::pi : std::asin(std::sqrt((l - a) / width));
  auto integrand = [&](double phi) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const double x = a + width * s * s;
    if (x <= 0.0) {
      // only reachable at phi = 0 with a = 0; the s^2 factors cancel there
      return law.gamma * width * c * c / std::numbers::pi;
    }
    return law.gamma * width * width * s * s * c * c / (std::numbers::pi * x);
  };
  return integrate(integrand, 0.0, phi_end, 1e-10);
}

TwMoments tw_largest_moments(int n, int sensors) {
  if (n < 2 || sensors < 2) {
    throw std::invalid_argument("tw_largest_moments: need n >= 2 and L >= 2");
  }
  const double ratio = static_cast<double>(sensors) / static_cast<double>(n);
  const double mu = (1.0 + std::sqrt(ratio)) * (1.0 + std::sqrt(ratio));
  const double s = std::sqrt(mu / n) *
                   std::cbrt(1.0 / std::sqrt(static_cast<double>(n)) +
                             1.0 / std::sqrt(static_cast<double>(sensors)));
  return {mu - 1.8 * s, 0.9 * s};
}

VarianceEquivalence variance_equivalence(int sensors, int n, double sigma2) {
  if (sensors < 2 || n < 2 || !(sigma2 > 0.0)) {
    throw std::invalid_argument("variance_equivalence: invalid arguments");
  }
  const double s = std::sqrt(static_cast<double>(sensors) / static_cast<double>(n));
  const double s4 = sigma2 * sigma2;
  VarianceEquivalence out;
  out.var_stochastic = s4 * (1.0 + 4.0 * s) / n;
  out.var_deterministic = s4 * (2.0 * (1.0 + 2.0 * s) - 1.0) / n;
  out.asymptotic_ok = 2 * sensors <= n;
  return out;
}

}  // namespace mdl

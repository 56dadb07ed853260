#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mdl/eigstats.hpp"
#include "mdl/simulator.hpp"
#include "test_helpers.hpp"

using namespace mdl;
using mdl::test::batch_summary;
using mdl::test::make_scenario;
using mdl::test::midpoint_integral;

TEST_SUITE_BEGIN("eigstats");

namespace {

PopulationSpectrum direct_spectrum(std::initializer_list<double> lambdas, double sigma2, int d) {
  PopulationSpectrum s;
  s.lambdas.resize(static_cast<Eigen::Index>(lambdas.size()));
  Eigen::Index i = 0;
  for (double l : lambdas) s.lambdas[i++] = l;
  s.sigma2 = sigma2;
  s.d = d;
  return s;
}

}  // namespace

TEST_CASE("brillinger_cov: zero-mean reduction and unit case") {
  const int L = 4;
  const int n = 20;
  RngStream rng(90, 0);
  ComplexVector alpha(L), beta(L), gamma(L), zeta(L);
  ComplexMatrix b(L, L);
  for (int i = 0; i < L; ++i) {
    alpha[i] = rng.complex_normal(1.0);
    beta[i] = rng.complex_normal(1.0);
    gamma[i] = rng.complex_normal(1.0);
    zeta[i] = rng.complex_normal(1.0);
    for (int j = 0; j < L; ++j) b(i, j) = rng.complex_normal(1.0);
  }
  const ComplexMatrix sigma = b * b.adjoint() + 0.5 * ComplexMatrix::Identity(L, L);

  const Complex reduced = alpha.dot(sigma * gamma) * zeta.dot(sigma * beta) / double(n);
  const Complex full = brillinger_cov(alpha, beta, gamma, zeta, sigma, ComplexMatrix(), n);
  CHECK(std::abs(full - reduced) <= 1e-15 * std::abs(reduced));

  ComplexVector e1 = ComplexVector::Zero(L);
  e1[0] = 1.0;
  const Complex unit =
      brillinger_cov(e1, e1, e1, e1, ComplexMatrix::Identity(L, L), ComplexMatrix(), n);
  CHECK(unit.real() == doctest::Approx(1.0 / n).epsilon(1e-15));
  CHECK(unit.imag() == doctest::Approx(0.0));

  CHECK_THROWS_AS(
      brillinger_cov(ComplexVector::Zero(3), beta, gamma, zeta, sigma, ComplexMatrix(), n),
      std::invalid_argument);
  CHECK_THROWS_AS(
      brillinger_cov(alpha, beta, gamma, zeta, sigma, ComplexMatrix::Zero(3, n), n),
      std::invalid_argument);
}

TEST_CASE("brillinger_cov: nonzero-mean MC check (4 SE)") {
  const int L = 4;
  const int n = 20;
  RngStream setup(91, 0);
  ComplexVector alpha(L), beta(L), gamma(L), zeta(L);
  ComplexMatrix b(L, L), mu(L, n);
  for (int i = 0; i < L; ++i) {
    alpha[i] = setup.complex_normal(1.0);
    beta[i] = setup.complex_normal(1.0);
    gamma[i] = setup.complex_normal(1.0);
    zeta[i] = setup.complex_normal(1.0);
    for (int j = 0; j < L; ++j) b(i, j) = setup.complex_normal(1.0);
    for (int t = 0; t < n; ++t) mu(i, t) = 1.5 * setup.complex_normal(1.0);
  }
  const ComplexMatrix sigma = b * b.adjoint() + 0.5 * ComplexMatrix::Identity(L, L);
  const ComplexMatrix chol = Eigen::LLT<ComplexMatrix>(sigma).matrixL();

  const int batches = 25;
  const int per_batch = 1000;
  std::vector<Complex> cov_b(batches);
  for (int bi = 0; bi < batches; ++bi) {
    Complex su{}, sv{}, suv{};
    for (int t = 0; t < per_batch; ++t) {
      RngStream rng(91, 1 + static_cast<std::uint64_t>(bi) * per_batch + t);
      ComplexMatrix w(L, n);
      for (int c = 0; c < n; ++c) {
        for (int r = 0; r < L; ++r) w(r, c) = rng.complex_normal(1.0);
      }
      const ComplexMatrix y = mu + chol * w;
      const ComplexMatrix rhat = (y * y.adjoint()) / double(n);
      const Complex u = alpha.dot(rhat * beta);
      const Complex v = gamma.dot(rhat * zeta);
      su += u;
      sv += v;
      suv += u * std::conj(v);
    }
    cov_b[bi] = suv / double(per_batch) -
                (su / double(per_batch)) * std::conj(sv / double(per_batch));
  }
  Complex mc{};
  for (const Complex& c : cov_b) mc += c;
  mc /= double(batches);
  double spread = 0.0;
  for (const Complex& c : cov_b) spread += std::norm(c - mc);
  const double se = std::sqrt(spread / (batches - 1) / batches);

  const Complex formula = brillinger_cov(alpha, beta, gamma, zeta, sigma, mu, n);
  CHECK(std::abs(mc - formula) <= 4.0 * se);
}

TEST_CASE("stochastic_eig_moments: single-source worked example") {
  // lambda = (1.5, 1, ..., 1), L = 10, n = 100
  const PopulationSpectrum spec =
      population_spectrum(make_scenario(10, 100, {0.0}, 0.05, 1.0));
  REQUIRE(spec.lambdas[0] == doctest::Approx(1.5).epsilon(1e-12));

  const EigMoments m = stochastic_eig_moments(spec, 100);
  REQUIRE(m.applicable[0]);
  CHECK(m.mean[0] == doctest::Approx(1.77).epsilon(1e-9));
  CHECK(std::sqrt(m.variance[0]) == doctest::Approx(0.15).epsilon(1e-12));
  for (int i = 1; i < 10; ++i) {
    CHECK_FALSE(m.applicable[i]);
    CHECK_FALSE(m.ill_conditioned[i]);
  }

  // bias matches the single-source closed form (L-1) lambda sigma^2 / (n (lambda - sigma^2))
  const double bias = 9.0 * 1.5 / (100.0 * 0.5);
  CHECK(m.mean[0] - spec.lambdas[0] == doctest::Approx(bias).epsilon(1e-9));
}

TEST_CASE("eig moments: deterministic equals stochastic term-by-term at lambda_j = sigma^2") {
  // with lambda_j = s2 both summands reduce to lambda_i s2 / (lambda_i - s2);
  // exact-double values keep the check bitwise meaningful
  for (double li : {3.0, 2.0, 1.5}) {
    const double s2 = 1.0;
    const double sto = li * s2 / (li - s2);
    const double det = ((li + s2) * s2 - s2 * s2) / (li - s2);
    CHECK(sto == det);
  }
  // and the variances coincide at lambda_i = sigma^2
  const double s2 = 1.0;
  CHECK((2.0 * s2 * s2 - s2 * s2) == s2 * s2);
}

TEST_CASE("eig moments: separation floor flags close eigenvalues") {
  const PopulationSpectrum spec = direct_spectrum({2.0, 2.0 + 1e-9, 1.0, 1.0}, 1.0, 2);
  const EigMoments m = stochastic_eig_moments(spec, 100);
  CHECK_FALSE(m.applicable[0]);
  CHECK(m.ill_conditioned[0]);
  CHECK_FALSE(m.applicable[1]);
  CHECK(m.ill_conditioned[1]);
}

TEST_CASE("eig moments: MC agreement for lambda = (3,1,1,1), n = 200 (4 SE)") {
  Scenario sc = make_scenario(4, 200, {0.0}, 0.5, 1.0);
  const PopulationSpectrum spec = population_spectrum(sc);
  const int batches = 20;
  const int per_batch = 500;

  auto run_check = [&](SignalModel model) {
    sc.model = model;
    ComplexMatrix fixed;
    if (model == SignalModel::kDeterministic) {
      RngStream rng(92, 0);
      fixed = deterministic_source_matrix(sc.sources, sc.snapshots, rng);
    }
    std::vector<double> mean_b(batches), var_b(batches);
    for (int bi = 0; bi < batches; ++bi) {
      double sum = 0.0, sum_sq = 0.0;
      for (int t = 0; t < per_batch; ++t) {
        RngStream rng(92, 1 + static_cast<std::uint64_t>(bi) * per_batch + t);
        const SnapshotSet snap = model == SignalModel::kDeterministic
                                     ? generate_snapshots_fixed_signal(sc, fixed, rng)
                                     : generate_snapshots(sc, rng);
        sum += snap.sample_eigs[0];
        sum_sq += snap.sample_eigs[0] * snap.sample_eigs[0];
      }
      mean_b[bi] = sum / per_batch;
      var_b[bi] = (sum_sq - sum * sum / per_batch) / (per_batch - 1);
    }
    const EigMoments formula = model == SignalModel::kDeterministic
                                   ? deterministic_eig_moments(spec, 200)
                                   : stochastic_eig_moments(spec, 200);
    const auto ms = batch_summary(mean_b);
    const auto vs = batch_summary(var_b);
    CHECK(std::abs(ms.mean - formula.mean[0]) <= 4.0 * ms.se);
    CHECK(std::abs(vs.mean - formula.variance[0]) <= 4.0 * vs.se);
  };

  run_check(SignalModel::kStochastic);
  run_check(SignalModel::kDeterministic);
}

TEST_CASE("perturbation coefficient covariance: quick MC (4 SE)") {
  const int L = 4;
  const int n = 20;
  const double s2 = 1.0;
  const RealVector lambdas = (RealVector(4) << 4.0, 2.5, 1.0, 1.0).finished();
  const ComplexMatrix r = lambdas.cast<Complex>().asDiagonal();
  ComplexMatrix mu = ComplexMatrix::Zero(L, n);
  for (int k = 0; k < L; ++k) {
    const double amp = std::sqrt(std::max(0.0, lambdas[k] - s2));
    for (int t = 0; t < n; ++t) {
      const double ph = 2.0 * std::numbers::pi * k * t / n;
      mu(k, t) = amp * Complex(std::cos(ph), std::sin(ph));
    }
  }
  REQUIRE((mu * mu.adjoint() - double(n) * (r - s2 * ComplexMatrix::Identity(L, L))).norm() <
          1e-9);

  const int batches = 20;
  const int per_batch = 1000;
  std::vector<double> var01(batches);
  std::vector<Complex> cross(batches);
  for (int bi = 0; bi < batches; ++bi) {
    Complex s01{}, s02{}, sc{};
    double a01 = 0.0;
    for (int t = 0; t < per_batch; ++t) {
      RngStream rng(93, static_cast<std::uint64_t>(bi) * per_batch + t);
      ComplexMatrix y(L, n);
      for (int c = 0; c < n; ++c) {
        for (int rr = 0; rr < L; ++rr) y(rr, c) = mu(rr, c) + rng.complex_normal(s2);
      }
      const ComplexMatrix delta = (y * y.adjoint()) / double(n) - r;
      const Complex t01 = delta(1, 0) / (lambdas[0] - lambdas[1]);
      const Complex t02 = delta(2, 0) / (lambdas[0] - lambdas[2]);
      s01 += t01;
      s02 += t02;
      a01 += std::norm(t01);
      sc += t01 * std::conj(t02);
    }
    const double inv = 1.0 / per_batch;
    var01[bi] = a01 * inv - std::norm(s01 * inv);
    cross[bi] = sc * inv - (s01 * inv) * std::conj(s02 * inv);
  }
  const auto vs = batch_summary(var01);
  const double formula =
      ((lambdas[0] + lambdas[1]) * s2 - s2 * s2) / (n * std::pow(lambdas[0] - lambdas[1], 2));
  CHECK(std::abs(vs.mean - formula) <= 4.0 * vs.se);

  Complex cross_mean{};
  for (const Complex& c : cross) cross_mean += c;
  cross_mean /= double(batches);
  double spread = 0.0;
  for (const Complex& c : cross) spread += std::norm(c - cross_mean);
  const double cross_se = std::sqrt(spread / (batches - 1) / batches);
  CHECK(std::abs(cross_mean) <= 4.0 * cross_se);
}

TEST_CASE("mp law: support, density, normalization") {
  const MpLaw unit = mp_law(1.0);
  CHECK(unit.lower == doctest::Approx(0.0));
  CHECK(unit.upper == doctest::Approx(4.0));
  const MpLaw four = mp_law(4.0);
  CHECK(four.lower == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(four.upper == doctest::Approx(2.25).epsilon(1e-14));
  CHECK_THROWS_AS(mp_law(0.0), std::invalid_argument);

  CHECK(mp_density(0.2, four) == 0.0);
  CHECK(mp_density(2.3, four) == 0.0);
  for (double l = 0.26; l < 2.25; l += 0.05) {
    CHECK(mp_density(l, four) >= 0.0);
  }

  // independent midpoint-rule oracle for the normalization
  for (double gamma : {1.0, 2.0, 4.0, 10.0}) {
    const MpLaw law = mp_law(gamma);
    const double oracle = midpoint_integral([&](double l) { return mp_density(l, law); },
                                            law.lower, law.upper, 2000000);
    CHECK(std::abs(oracle - 1.0) <= 1e-6);
    CHECK(std::abs(mp_cdf(law.upper, law) - 1.0) <= 1e-6);
  }
}

TEST_CASE("mp_cdf: monotone and consistent with the midpoint oracle") {
  const MpLaw law = mp_law(4.0);
  CHECK(mp_cdf(law.lower, law) == 0.0);
  CHECK(mp_cdf(law.lower - 1.0, law) == 0.0);
  double prev = -1.0;
  for (double l = 0.25; l <= 2.30; l += 0.05) {
    const double c = mp_cdf(l, law);
    CHECK(c >= prev - 1e-12);
    prev = c;
  }
  const double mid = 0.5 * (law.lower + law.upper);
  const double oracle = midpoint_integral([&](double l) { return mp_density(l, law); },
                                          law.lower, mid, 1000000);
  CHECK(mp_cdf(mid, law) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("tw_largest_moments: pinned example and tail claim") {
  const TwMoments tw = tw_largest_moments(100, 10);
  CHECK(tw.mean == doctest::Approx(1.5555612061688077).epsilon(1e-12));
  CHECK(tw.stddev == doctest::Approx(0.088447162932434059).epsilon(1e-12));
  // the largest eigenvalue exceeds 1.3 with high probability at this (n, L)
  CHECK(tw.mean - 2.0 * tw.stddev > 1.3);
  CHECK_THROWS_AS(tw_largest_moments(1, 10), std::invalid_argument);
}

TEST_CASE("variance_equivalence: identity and pinned value") {
  const VarianceEquivalence eq = variance_equivalence(10, 100, 1.0);
  CHECK(eq.var_stochastic == doctest::Approx(0.022649110640673517).epsilon(1e-14));
  CHECK(eq.var_stochastic == eq.var_deterministic);
  CHECK(eq.asymptotic_ok);
  CHECK_FALSE(variance_equivalence(10, 12, 1.0).asymptotic_ok);

  RngStream rng(94, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const int L = 2 + static_cast<int>(rng.uniform() * 40);
    const int n = 2 * L + static_cast<int>(rng.uniform() * 1000);
    const double s2 = 0.2 + 5.0 * rng.uniform();
    const VarianceEquivalence e = variance_equivalence(L, n, s2);
    CHECK(std::abs(e.var_stochastic - e.var_deterministic) <= 1e-15 * e.var_stochastic);
  }
}

TEST_CASE("variance_equivalence: exact variances differ only at O(L/n) at the bulk edge") {
  // lambda_d = s2 (1 + s)^2 with s = sqrt(L/n):
  // lambda_d^2 - (2 lambda_d s2 - s2^2) = s2^2 (4 s^2 + 4 s^3 + s^4)
  for (double s2 : {1.0, 2.5}) {
    for (double ratio : {0.05, 0.1, 0.3, 0.5}) {
      const double s = std::sqrt(ratio);
      const double lambda_edge = s2 * (1.0 + s) * (1.0 + s);
      const double var_sto = lambda_edge * lambda_edge;
      const double var_det = 2.0 * lambda_edge * s2 - s2 * s2;
      const double expansion = s2 * s2 * (4.0 * s * s + 4.0 * s * s * s + s * s * s * s);
      CHECK(var_sto - var_det == doctest::Approx(expansion).epsilon(1e-12));
    }
  }
}

TEST_SUITE_END();

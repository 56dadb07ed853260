#include <doctest.h>

#include <cmath>

#include "mdl/enumerator.hpp"
#include "mdl/simulator.hpp"
#include "test_helpers.hpp"

using namespace mdl;
using mdl::test::make_scenario;

TEST_SUITE_BEGIN("enumerator");

namespace {

RealVector vec(std::initializer_list<double> values) {
  RealVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("arithmetic_mean_tail") {
  CHECK(arithmetic_mean_tail(vec({2.0, 2.0, 2.0, 2.0}), 0) == doctest::Approx(2.0));
  CHECK(arithmetic_mean_tail(vec({2.0, 2.0, 2.0, 2.0}), 2) == doctest::Approx(2.0));
  CHECK(arithmetic_mean_tail(vec({4.0, 1.0, 1.0}), 1) == doctest::Approx(1.0));
  CHECK(arithmetic_mean_tail(vec({5.0, 3.0, 2.0, 1.0}), 1) == doctest::Approx(2.0));

  CHECK_THROWS_AS(arithmetic_mean_tail(vec({3.0, 2.0}), 2), std::invalid_argument);
  CHECK_THROWS_AS(arithmetic_mean_tail(vec({3.0, 2.0}), -1), std::invalid_argument);
  CHECK_THROWS_AS(arithmetic_mean_tail(vec({1.0, 2.0}), 0), std::invalid_argument);  // unsorted
}

TEST_CASE("geometric_mean_tail") {
  CHECK(geometric_mean_tail(vec({3.0, 3.0, 3.0}), 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(geometric_mean_tail(vec({4.0, 2.0, 2.0}), 0) ==
        doctest::Approx(2.5198420997897464).epsilon(1e-12));
  CHECK_THROWS_AS(geometric_mean_tail(vec({1.0, 0.0}), 0), std::domain_error);
  CHECK_THROWS_AS(geometric_mean_tail(vec({1.0, -0.5}), 1), std::domain_error);
}

TEST_CASE("AM-GM holds on random spectra") {
  RngStream rng(55, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const int L = 2 + static_cast<int>(rng.uniform() * 10);
    RealVector l(L);
    for (int i = 0; i < L; ++i) l[i] = 0.05 + 5.0 * rng.uniform();
    std::sort(l.data(), l.data() + L, std::greater<double>());
    for (int d = 0; d < L; ++d) {
      CHECK(arithmetic_mean_tail(l, d) >= geometric_mean_tail(l, d) * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("mdl_criterion: pinned and structural cases") {
  SUBCASE("spherical spectrum leaves only the penalty") {
    const RealVector flat = vec({2.0, 2.0, 2.0, 2.0, 2.0});
    for (int d = 0; d < 5; ++d) {
      const double expected = 0.5 * d * (10 - d) * std::log(100.0);
      CHECK(mdl_criterion(flat, d, 100) == doctest::Approx(expected).epsilon(1e-14));
    }
  }

  SUBCASE("L = 2, d = 1 is pure penalty") {
    CHECK(mdl_criterion(vec({7.0, 0.4}), 1, 50) ==
          doctest::Approx(1.5 * std::log(50.0)).epsilon(1e-14));
  }

  SUBCASE("pinned direct evaluation") {
    const RealVector l = vec({5.0, 1.0, 1.0, 1.0, 1.0});
    CHECK(mdl_criterion(l, 0, 100) == doctest::Approx(132.94954120764947).epsilon(1e-12));
    CHECK(mdl_criterion(l, 1, 100) == doctest::Approx(20.723265836946411).epsilon(1e-12));
  }

  CHECK_THROWS_AS(mdl_criterion(vec({2.0, 1.0}), 0, 1), std::invalid_argument);
}

TEST_CASE("estimate_d: argmin, ties, scale invariance") {
  SUBCASE("spherical spectrum picks d = 0") {
    const MdlResult r = estimate_d(vec({1.5, 1.5, 1.5, 1.5}), 200);
    CHECK(r.d_hat == 0);
    CHECK(r.criterion[0] == doctest::Approx(0.0));
  }

  SUBCASE("clearly split spectrum picks d = 1") {
    const MdlResult r = estimate_d(vec({50.0, 1.0, 1.0, 1.0, 1.0, 1.0}), 500);
    CHECK(r.d_hat == 1);
    CHECK(r.arith_mean[1] == doctest::Approx(1.0));
    CHECK(r.geom_mean[1] == doctest::Approx(1.0));
  }

  SUBCASE("scale invariance of the decision") {
    RngStream rng(66, 0);
    for (int rep = 0; rep < 50; ++rep) {
      RealVector l(6);
      for (int i = 0; i < 6; ++i) l[i] = 0.1 + 4.0 * rng.uniform();
      std::sort(l.data(), l.data() + 6, std::greater<double>());
      const MdlResult base = estimate_d(l, 120);
      for (double scale : {1e-6, 17.0, 1e6}) {
        const MdlResult scaled = estimate_d(scale * l, 120);
        CHECK(scaled.d_hat == base.d_hat);
        for (int d = 0; d < 6; ++d) {
          // data terms are invariant; the whole criterion must match closely
          CHECK(scaled.criterion[d] ==
                doctest::Approx(base.criterion[d]).epsilon(1e-9).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("estimate_d: null data rarely false-alarms") {
  const Scenario null_case = make_scenario(3, 30, {}, 1.0, 1.0);
  const int trials = 2000;
  int correct = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(77, t);
    const SnapshotSet snap = generate_snapshots(null_case, rng);
    if (estimate_d(snap.sample_eigs, 30).d_hat == 0) ++correct;
  }
  CHECK(static_cast<double>(correct) / trials >= 0.99);
}

TEST_CASE("estimate_d: strong single source is found") {
  // lambda_1 / sigma^2 = 100 -> power (100 - 1) / L per source
  const Scenario s = make_scenario(5, 100, {10.0}, 99.0 / 5.0, 1.0);
  const int trials = 1000;
  int correct = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(78, t);
    const SnapshotSet snap = generate_snapshots(s, rng);
    if (estimate_d(snap.sample_eigs, 100).d_hat == 1) ++correct;
  }
  CHECK(static_cast<double>(correct) / trials >= 0.99);
}

TEST_CASE("estimate_d: detection probability grows with n") {
  const int trials = 600;
  double prev = -1.0;
  int idx = 0;
  for (int n : {50, 200, 800}) {
    const Scenario s = make_scenario(5, n, {0.0}, 0.3, 1.0);
    int correct = 0;
    for (int t = 0; t < trials; ++t) {
      RngStream rng(79, static_cast<std::uint64_t>(idx) * trials + t);
      const SnapshotSet snap = generate_snapshots(s, rng);
      if (estimate_d(snap.sample_eigs, n).d_hat == 1) ++correct;
    }
    const double p = static_cast<double>(correct) / trials;
    // allow 2 SE of slack for the monotonicity check
    CHECK(p >= prev - 2.0 * std::sqrt(0.25 / trials));
    prev = p;
    ++idx;
  }
  CHECK(prev >= 0.99);  // by n = 800 detection is essentially sure
}

TEST_SUITE_END();

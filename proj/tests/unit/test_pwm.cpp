#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rfa/egpd.hpp"
#include "rfa/errors.hpp"
#include "rfa/pwm.hpp"
#include "rfa/rng.hpp"

using namespace rfa;

namespace {

std::vector<double> exponential_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.exponential();
  return v;
}

std::vector<double> gpd_sample(std::size_t n, double sigma, double xi, std::uint64_t seed) {
  Rng rng(seed);
  const Egpd d(1.0, sigma, xi);
  std::vector<double> v(n);
  for (auto& x : v) x = d.quantile(rng.uniform_open01());
  return v;
}

}  // namespace

TEST_CASE("constant sample gives (c, c/2, c/3): the weights telescope") {
  for (double c : {1.0, 4.2, 0.037}) {
    const std::vector<double> s(64, c);
    const PwmTriple p = estimate_pwm(s);
    CHECK(p.a0 == doctest::Approx(c).epsilon(1e-14));
    CHECK(p.a1 == doctest::Approx(c / 2.0).epsilon(1e-14));
    CHECK(p.a2 == doctest::Approx(c / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("unit exponential: alpha = (1, 3/4, 11/18) and omega = 2/3") {
  const auto s = exponential_sample(100000, 7);
  const PwmTriple p = estimate_pwm(s);
  CHECK(std::fabs(p.a0 - 1.0) < 0.02);
  CHECK(std::fabs(p.a1 - 0.75) < 0.02);
  CHECK(std::fabs(p.a2 - 11.0 / 18.0) < 0.02);
  const OmegaResult w = omega_ratio(s);
  REQUIRE_FALSE(w.degenerate);
  CHECK(std::fabs(w.omega - 2.0 / 3.0) < 0.02);
}

TEST_CASE("degree-1 homogeneity") {
  const auto s = exponential_sample(500, 11);
  const PwmTriple p = estimate_pwm(s);

  SUBCASE("power-of-two scale is exact") {
    std::vector<double> s4 = s;
    for (auto& v : s4) v *= 4.0;
    const PwmTriple p4 = estimate_pwm(s4);
    CHECK(p4.a0 == 4.0 * p.a0);
    CHECK(p4.a1 == 4.0 * p.a1);
    CHECK(p4.a2 == 4.0 * p.a2);
  }
  SUBCASE("general scales within 1e-12") {
    for (double c : {0.01, 5.0, 1000.0}) {
      std::vector<double> sc = s;
      for (auto& v : sc) v *= c;
      const PwmTriple pc = estimate_pwm(sc);
      CHECK(pc.a0 == doctest::Approx(c * p.a0).epsilon(1e-12));
      CHECK(pc.a1 == doctest::Approx(c * p.a1).epsilon(1e-12));
      CHECK(pc.a2 == doctest::Approx(c * p.a2).epsilon(1e-12));
      const double w = omega_ratio(sc).omega;
      CHECK(w == doctest::Approx(omega_ratio(s).omega).epsilon(1e-12));
    }
  }
}

TEST_CASE("order-statistic weights are non-negative") {
  // raising any single order statistic must not decrease any moment
  auto s = exponential_sample(40, 3);
  std::sort(s.begin(), s.end());
  const PwmTriple base = estimate_pwm_sorted(s);
  for (std::size_t j = 0; j < s.size(); ++j) {
    auto bumped = s;
    bumped[j] += 1e-3;
    if (j + 1 < s.size() && bumped[j] > bumped[j + 1]) continue;  // keep sorted
    const PwmTriple p = estimate_pwm_sorted(bumped);
    CHECK(p.a0 >= base.a0 - 1e-15);
    CHECK(p.a1 >= base.a1 - 1e-15);
    CHECK(p.a2 >= base.a2 - 1e-15);
  }
}

TEST_CASE("alpha ordering for non-degenerate samples") {
  const auto s = exponential_sample(200, 5);
  const PwmTriple p = estimate_pwm(s);
  CHECK(p.a0 > p.a1);
  CHECK(p.a1 > p.a2);
  CHECK(p.a2 > 0.0);
}

TEST_CASE("omega separates GPD shapes") {
  const auto a = gpd_sample(100000, 1.0, 0.0, 17);
  const auto b = gpd_sample(100000, 1.0, 0.4, 18);
  const double wa = omega_ratio(a).omega;
  const double wb = omega_ratio(b).omega;
  CHECK(std::fabs(wa - wb) > 0.05);  // theory: 2/3 vs 2/2.6
}

TEST_CASE("omega consistency: error shrinks with n") {
  // theory value by quadrature on the (effectively untruncated) GPD
  const double xi = 0.3;
  const auto ref = oracle::egpd_truncated_pwms(1.0, 1.0, xi, 1e-12);
  const double omega_theory = (3.0 * ref.a2 - 2.0 * ref.a1) / (2.0 * ref.a1 - ref.a0);
  CHECK(omega_theory == doctest::Approx(2.0 / (3.0 - xi)).epsilon(1e-6));

  double prev_err = std::numeric_limits<double>::infinity();
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    // average over a few replicates so the decreasing trend is not noise
    double err = 0.0;
    for (std::uint64_t r = 0; r < 5; ++r)
      err += std::fabs(omega_ratio(gpd_sample(n, 1.0, xi, 100 + r)).omega - omega_theory);
    err /= 5.0;
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("omega distance") {
  CHECK(omega_distance(0.5, 0.5) == 0.0);
  CHECK(omega_distance(0.2, 0.7) == doctest::Approx(0.5).epsilon(1e-15));
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
    CHECK(omega_distance(a, b) == omega_distance(b, a));
    CHECK(omega_distance(a, b) >= 0.0);
  }
}

TEST_CASE("degenerate guard") {
  const std::vector<double> constant(50, 3.3);
  const OmegaResult w = omega_ratio(constant);
  CHECK(w.degenerate);

  SUBCASE("near-constant also flagged") {
    std::vector<double> nearly(50, 3.3);
    nearly[0] += 3.3e-12;
    CHECK(omega_ratio(nearly).degenerate);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(estimate_pwm(std::vector<double>{1.0}), UsageError);
  CHECK_THROWS_AS(estimate_pwm(std::vector<double>{1.0, -2.0}), UsageError);
  CHECK_THROWS_AS(estimate_pwm(std::vector<double>{1.0, 0.0}), UsageError);
}

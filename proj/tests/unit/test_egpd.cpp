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
const std::vector<EgpdParams> kGrid = {
    {1.0, 1.0, 0.2},  {1.5, 4.0, 0.15}, {0.6, 2.5, 0.05}, {3.0, 7.0, 0.4},
    {2.0, 10.0, 0.0}, {0.9, 5.0, 0.6},  {1.2, 3.0, 0.85},
};
}

TEST_CASE("cdf boundary normalization") {
  for (const auto& p : kGrid) {
    const Egpd d(p);
    CHECK(d.cdf(0.0) == 0.0);
    CHECK(d.cdf(-1.0) == 0.0);
    CHECK(d.cdf(1e12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.survival(0.0) == 1.0);
  }
}

TEST_CASE("kappa = 1 reduces to the GPD") {
  const Egpd d(1.0, 1.0, 0.2);
  const double expect = 1.0 - std::pow(1.2, -5.0);
  CHECK(d.cdf(1.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(d.cdf(1.0) == doctest::Approx(0.59812).epsilon(1e-4));
}

TEST_CASE("flexibility exponent: kappa = 2 squares the kappa = 1 cdf") {
  const Egpd d1(1.0, 2.0, 0.3);
  const Egpd d2(2.0, 2.0, 0.3);
  for (double z : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    CHECK(d2.cdf(z) == doctest::Approx(d1.cdf(z) * d1.cdf(z)).epsilon(1e-13));
  }
}

TEST_CASE("quantile is the exact inverse of the cdf") {
  for (const auto& p : kGrid) {
    const Egpd d(p);
    for (double prob : {0.001, 0.01, 0.5, 0.99, 0.999, 0.9999}) {
      const double z = d.quantile(prob);
      CHECK(std::fabs(d.cdf(z) - prob) < 1e-10);
    }
  }
}

TEST_CASE("quantile closed-form spot checks") {
  const Egpd d(1.0, 1.0, 0.2);
  CHECK(d.quantile(1.0 - std::pow(1.2, -5.0)) == doctest::Approx(1.0).epsilon(1e-9));

  const Egpd e(1.0, 2.0, 0.0);
  CHECK(e.quantile(1.0 - std::exp(-1.0)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("analytic density matches finite differences of the cdf") {
  for (const auto& p : kGrid) {
    const Egpd d(p);
    for (double z : {0.2, 0.7, 1.5, 4.0, 12.0}) {
      const double h = 4e-6 * std::max(1.0, z);
      const double fd = (d.cdf(z + h) - d.cdf(z - h)) / (2.0 * h);
      CHECK(d.pdf(z) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("truncated cdf/quantile are consistent") {
  const double u = 1.0;
  for (const auto& p : kGrid) {
    const Egpd d(p);
    CHECK(d.cdf_truncated(u, u) == 0.0);
    for (double prob : {0.01, 0.5, 0.99, 0.999}) {
      const double z = d.quantile_truncated(prob, u);
      CHECK(z > u);
      CHECK(std::fabs(d.cdf_truncated(z, u) - prob) < 1e-10);
    }
    CHECK(d.survival_truncated(u, u) == 1.0);
    const double z = d.quantile_truncated(0.7, u);
    CHECK(d.survival_truncated(z, u) == doctest::Approx(0.3).epsilon(1e-10));
  }
}

TEST_CASE("closed-form truncated PWMs match the quadrature oracle") {
  const double u = 1.0;
  for (const auto& p : kGrid) {
    if (p.xi == 0.0) continue;  // xi = 0 handled below with its floor tolerance
    const Egpd d(p);
    const PwmTriple got = d.pwm_truncated(u);
    const auto ref = oracle::egpd_truncated_pwms(p.kappa, p.sigma, p.xi, u);
    CHECK(got.a0 == doctest::Approx(ref.a0).epsilon(1e-9));
    CHECK(got.a1 == doctest::Approx(ref.a1).epsilon(1e-9));
    CHECK(got.a2 == doctest::Approx(ref.a2).epsilon(1e-9));
  }
}

TEST_CASE("truncated PWMs at xi = 0 use the smooth floor") {
  const auto ref = oracle::egpd_truncated_pwms(2.0, 10.0, 0.0, 1.0);
  const PwmTriple got = Egpd(2.0, 10.0, 0.0).pwm_truncated(1.0);
  CHECK(got.a0 == doctest::Approx(ref.a0).epsilon(1e-5));
  CHECK(got.a1 == doctest::Approx(ref.a1).epsilon(1e-5));
  CHECK(got.a2 == doctest::Approx(ref.a2).epsilon(1e-5));
}

TEST_CASE("PWM closure: empirical moments of a huge sample match theory") {
  const EgpdParams p{1.5, 4.0, 0.15};
  const double u = 1.0;
  const Egpd d(p);
  Rng rng(123);
  std::vector<double> sample(400000);
  for (auto& z : sample) z = d.sample_truncated(rng, u);
  const PwmTriple emp = estimate_pwm(sample);
  const PwmTriple theo = d.pwm_truncated(u);
  CHECK(emp.a0 == doctest::Approx(theo.a0).epsilon(0.01));
  CHECK(emp.a1 == doctest::Approx(theo.a1).epsilon(0.01));
  CHECK(emp.a2 == doctest::Approx(theo.a2).epsilon(0.01));
}

TEST_CASE("return level: exponential closed form") {
  // kappa=1, xi=0, sigma=10, n_wds=50, T=10 -> 10 ln(500)
  const double rl = return_level({1.0, 10.0, 0.0}, 10.0, 50.0);
  CHECK(rl == doctest::Approx(10.0 * std::log(500.0)).epsilon(1e-12));
  CHECK(rl == doctest::Approx(62.15).epsilon(1e-3));
}

TEST_CASE("return level: monotone in T, scales with sigma") {
  const EgpdParams p{1.4, 6.0, 0.2};
  const double r10 = return_level(p, 10.0, 45.0);
  const double r50 = return_level(p, 50.0, 45.0);
  const double r100 = return_level(p, 100.0, 45.0);
  CHECK(r50 > r10);
  CHECK(r100 > r50);

  EgpdParams doubled = p;
  doubled.sigma *= 2.0;
  CHECK(return_level(doubled, 50.0, 45.0) == doctest::Approx(2.0 * r50).epsilon(1e-13));
}

TEST_CASE("return level preconditions") {
  CHECK_THROWS_AS(return_level({1.0, 1.0, 0.1}, 0.5, 50.0), UsageError);
  CHECK_THROWS_AS(return_level({1.0, 1.0, 0.1}, 10.0, 0.0), UsageError);
  CHECK_THROWS_AS(return_level({1.0, 1.0, 0.1}, 1.0, 0.9), UsageError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(Egpd(0.0, 1.0, 0.1), UsageError);
  CHECK_THROWS_AS(Egpd(1.0, -1.0, 0.1), UsageError);
  CHECK_THROWS_AS(Egpd(1.0, 1.0, -0.01), UsageError);
  CHECK_THROWS_AS(Egpd(1.0, 1.0, 1.0), UsageError);
  CHECK_THROWS_AS(Egpd(1.0, 1.0, 0.1).quantile(0.0), UsageError);
  CHECK_THROWS_AS(Egpd(1.0, 1.0, 0.1).quantile(1.0), UsageError);
}

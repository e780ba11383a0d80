#include <doctest.h>

#include <cmath>
#include <complex>

#include "biflab/errors.hpp"
#include "biflab/motion.hpp"
#include "fixtures.hpp"

using namespace biflab;

TEST_SUITE("motion-tracker") {
  TEST_CASE("motion of the fixed point 2 of z^2 - 2 follows the closed form") {
    const auto quad = fixtures::family("quad");
    MotionOptions opt;
    opt.rho = 0.01;
    const auto rec = motion_hyperbolic(quad, -2.0, {cvec(2.0)}, opt);
    REQUIRE(rec.points.size() == 1);
    CHECK(rec.power == 1);
    CHECK(rec.expansion > 3.0);
    double worst = 0.0;
    for (std::size_t l = 0; l < rec.lambdas.size(); ++l) {
      const cplx exact = (1.0 + std::sqrt(1.0 - 4.0 * rec.lambdas[l])) / 2.0;
      worst = std::max(worst, std::abs(rec.images[l][0][0] - exact));
    }
    CHECK(worst <= 1e-10);
    CHECK(rec.max_conjugacy_residual <= 1e-8);
    CHECK(rec.max_cauchy_ratio <= 1.0 / (rec.expansion - 1.0));
    CHECK(rec.preserves_cycles);
  }

  TEST_CASE("motion of the 2-cycle at -1.8 keeps period and repulsion") {
    const auto quad = fixtures::family("quad");
    const double x = (-1.0 + std::sqrt(4.2)) / 2.0;
    MotionOptions opt;
    opt.rho = 0.005;
    const auto rec = motion_hyperbolic(quad, -1.8, {cvec(x)}, opt);
    CHECK(rec.points.size() == 2);
    CHECK(rec.power == 2);
    CHECK(rec.expansion == doctest::Approx(3.2).epsilon(1e-2));
    CHECK(rec.preserves_cycles);
    CHECK(rec.min_separation > 0.0);
    CHECK(rec.max_conjugacy_residual <= 1e-8);
    CHECK(rec.max_cauchy_ratio <= 1.0 / (rec.expansion - 1.0));
    for (std::size_t n = 1; n < rec.step_size.size(); ++n)
      CHECK(rec.step_size[n] <= rec.delta / 2.0 * std::pow(1.0 / (rec.expansion - 1.0), static_cast<double>(n)) + 1e-14);
  }

  TEST_CASE("a parameter-independent family moves trivially") {
    const auto rec = motion_hyperbolic(fixtures::family("cheb"), 0.0, {cvec(2.0)});
    for (const auto& row : rec.images) CHECK(std::abs(row[0][0] - 2.0) < 1e-14);
  }

  TEST_CASE("weak expansion is rejected") {
    try {
      motion_hyperbolic(fixtures::family("quad"), 0.0, {cvec(1.0)});
      FAIL("expected ExpansionHypothesisFailed");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ExpansionHypothesisFailed);
    }
  }

  TEST_CASE("a radius too large for the sampled constants is rejected") {
    MotionOptions opt;
    opt.rho = 0.5;
    try {
      motion_hyperbolic(fixtures::family("quad"), -2.0, {cvec(2.0)}, opt);
      FAIL("expected ContractionViolated");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ContractionViolated);
    }
  }

  TEST_CASE("non-periodic seeds are refused") {
    CHECK_THROWS_AS(motion_hyperbolic(fixtures::family("quad"), -2.0, {cvec(0.3)}), Error);
  }

  TEST_CASE("skew product fixed point moves with the base") {
    // (x^2, y^2) with the parameter-free product: (1,1) has |w| = 2 < 3 so use period-2 power of a 2-cycle
    const auto prod = fixtures::family("product");
    const cplx w = std::polar(1.0, 2.0 * kPi / 3.0);
    const auto rec = motion_hyperbolic(prod, 0.0, {cvec(w, w)});
    CHECK(rec.power == 2);
    CHECK(rec.preserves_cycles);
    CHECK(rec.max_conjugacy_residual <= 1e-12);
  }
}

#include <doctest.h>

#include <cmath>

#include "biflab/contraction.hpp"
#include "biflab/errors.hpp"
#include "fixtures.hpp"

using namespace biflab;

TEST_SUITE("motion-tracker") {
  TEST_CASE("inverse branches of z^2 on the unit circle") {
    ContractionOptions opt;
    opt.depth = 15;
    const auto rep = contraction_report(fixtures::family("z2"), opt);
    REQUIRE(rep.rows.size() == 15);
    for (const auto& row : rep.rows) {
      CHECK(row.r_p == doctest::Approx(4.0).epsilon(1e-12));
      CHECK(row.measured_lip == doctest::Approx(std::pow(2.0, -row.n)).epsilon(1e-3));
      CHECK(row.measured_lip <= row.bound);
      CHECK(row.bound == doctest::Approx(std::pow(std::exp(0.1 + 0.1 / 3.0) / 2.0, row.n)));
    }
    CHECK(rep.fitted_rate == doctest::Approx(std::log(2.0)).epsilon(1e-3));
    for (const auto& z : rep.orbit) CHECK(std::abs(std::abs(z) - 1.0) < 1e-9);
  }

  TEST_CASE("z^2 - 2 contracts along backward orbits") {
    ContractionOptions opt;
    opt.center = -2.0;
    const auto rep = contraction_report(fixtures::family("quad"), opt);
    CHECK(rep.within_bound);
    CHECK(rep.fitted_rate > 0.2);
  }

  TEST_CASE("period-2 steps and seeded runs") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      ContractionOptions opt;
      opt.center = -2.0;
      opt.seed = seed;
      opt.depth = 8;
      opt.period = seed % 2 == 0 ? 2 : 1;
      ContractionReport rep;
      CHECK_NOTHROW(rep = contraction_report(fixtures::family("quad"), opt));
      CHECK(rep.within_bound);
    }
  }

  TEST_CASE("reports are reproducible") {
    ContractionOptions opt;
    opt.center = cplx(-0.1, 0.2);
    opt.seed = 9;
    const auto a = contraction_report(fixtures::family("quad"), opt);
    const auto b = contraction_report(fixtures::family("quad"), opt);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].measured_lip == b.rows[i].measured_lip);
  }

  TEST_CASE("two-dimensional families are unsupported") {
    CHECK_THROWS_AS(contraction_report(fixtures::family("product")), Error);
  }
}

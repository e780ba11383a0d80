#include <doctest.h>

#include <cmath>

#include "biflab/errors.hpp"
#include "biflab/green.hpp"
#include "biflab/rng.hpp"
#include "fixtures.hpp"

using namespace biflab;

namespace {

HVec hvec(cplx a, cplx b) {
  HVec v(2);
  v << a, b;
  return v;
}

FamilySpec squares() {
  std::vector<std::vector<Monomial>> coords(2);
  coords[0].push_back(Monomial{{2, 0, 0}, ParamPolynomial::constant(1.0)});
  coords[1].push_back(Monomial{{0, 2, 0}, ParamPolynomial::constant(1.0)});
  return FamilySpec(1, 2, FamilyKind::generic, coords);
}

// Independent oracle for z² + λ: iterate in the chart until the orbit is
// huge (then log|z_n| / 2^n has error far below 1e-15) or for 60 steps.
double brute_escape(cplx lambda, cplx z) {
  double scale = 1.0;
  for (int n = 0; n < 60; ++n) {
    if (std::abs(z) > 1e40) return scale * std::log(std::abs(z));
    z = z * z + lambda;
    scale /= 2.0;
  }
  return scale * std::log(std::hypot(std::abs(z), 1.0));
}

}  // namespace

TEST_SUITE("green-engine") {
  TEST_CASE("green_value examples") {
    const GreenEvaluator ev(squares(), 1e-10);
    CHECK(std::abs(ev.value(0.0, hvec(1.0, 0.0)).value) <= 1e-10);
    CHECK(std::abs(ev.value(0.0, hvec(2.0, 0.0)).value - std::log(2.0)) <= 1e-10);
    const GreenEvaluator q(fixtures::family("quad"), 1e-10);
    CHECK(std::abs(q.value(0.0, hvec(0.0, 1.0)).value) <= 1e-10);
  }

  TEST_CASE("depth satisfies the certified tail bound") {
    const GreenEvaluator ev(fixtures::family("quad"), 1e-9, LambdaWindow{-0.75, 1.5, 1.5});
    const double d = 2.0;
    CHECK(ev.sup_bound() * std::pow(d, -ev.n_steps()) / (d - 1.0) <= 1e-9);
    CHECK(ev.sup_bound() * std::pow(d, -(ev.n_steps() - 1)) / (d - 1.0) > 1e-9);
    CHECK(ev.tail_bound() <= 1e-9);
  }

  TEST_CASE("green_affine examples against the brute-force oracle") {
    const double tol = 1e-10;
    const GreenEvaluator ev(fixtures::family("quad"), tol, LambdaWindow{-1.0, 1.5, 1.5});
    CHECK(std::abs(ev.affine(0.0, cvec(0.0))) <= tol);
    CHECK(std::abs(ev.affine(-2.0, cvec(0.0))) <= tol);
    const double g4 = ev.affine(0.0, cvec(4.0));
    CHECK(std::abs(g4 - (brute_escape(0.0, 4.0) - 0.5 * std::log(17.0))) <= 2 * tol);
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
      const cplx lam(uniform(rng, -2.5, 0.5), uniform(rng, -1.5, 1.5));
      const cplx z(uniform(rng, -3, 3), uniform(rng, -3, 3));
      CHECK(std::abs(ev.escape_rate(lam, z) - brute_escape(lam, z)) <= 2 * tol);
    }
  }

  TEST_CASE("functional equation residual") {
    Rng rng(8);
    const GreenEvaluator sq(squares(), 1e-10);
    CHECK(sq.functional_equation_residual(0.0, hvec(1.0, 0.0)) <= 2 * 1e-10 * 3);
    const cplx lam(0.3, 0.1);
    const GreenEvaluator q(fixtures::family("quad"), 1e-10, LambdaWindow{lam, 0.0, 0.0});
    const GreenEvaluator l(fixtures::family("lattes"), 1e-10);
    for (int i = 0; i < 50; ++i) {
      CHECK(q.functional_equation_residual(lam, random_unit_vector(rng, 2)) <= 2 * 1e-10 * 3);
      CHECK(l.functional_equation_residual(0.0, random_unit_vector(rng, 2)) <= 2 * 1e-10 * 5);
    }
  }

  TEST_CASE("log-homogeneity") {
    Rng rng(9);
    const double tol = 1e-10;
    const GreenEvaluator ev(fixtures::family("skew"), tol, LambdaWindow{0.0, 0.5, 0.5});
    for (int i = 0; i < 100; ++i) {
      const cplx lam(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
      const HVec z = random_unit_vector(rng, 3) * uniform(rng, 0.1, 5.0);
      const cplx u = std::polar(uniform(rng, 0.01, 100.0), uniform(rng, 0.0, 6.3));
      CHECK(std::abs(ev.value(lam, u * z).value - ev.value(lam, z).value - std::log(std::abs(u))) <= 2 * tol);
    }
  }

  TEST_CASE("monotone geometric tail") {
    Rng rng(10);
    const GreenEvaluator ev(fixtures::family("cubic"), 1e-9, LambdaWindow{0.0, 1.0, 1.0});
    for (int i = 0; i < 20; ++i) {
      const cplx lam(uniform(rng, -1, 1), uniform(rng, -1, 1));
      const auto sums = ev.partial_sums(lam, random_unit_vector(rng, 2));
      CHECK(static_cast<int>(sums.size()) == ev.n_steps() + 1);
      for (std::size_t n = 0; n + 1 < sums.size(); ++n)
        CHECK(std::abs(sums[n + 1] - sums[n]) <= ev.sup_bound() * std::pow(3.0, -static_cast<double>(n + 1)));
    }
  }

  TEST_CASE("Hölder continuity in the parameter (regression)") {
    // fitted on a fixed sample: |ΔG| ≤ C·|Δλ|^h with C = 2, h = 0.5
    Rng rng(12);
    const GreenEvaluator ev(fixtures::family("quad"), 1e-10, LambdaWindow{-0.5, 1.5, 1.5});
    for (int i = 0; i < 100; ++i) {
      const cplx lam(uniform(rng, -2, 1), uniform(rng, -1.5, 1.5));
      const cplx dl = std::polar(std::pow(10.0, uniform(rng, -6, -2)), uniform(rng, 0, 6.3));
      const HVec z = hvec(0.0, 1.0);
      const double dg = std::abs(ev.value(lam + dl, z).value - ev.value(lam, z).value);
      CHECK(dg <= 2.0 * std::pow(std::abs(dl), 0.5));
    }
  }

  TEST_CASE("degenerate lift is reported") {
    std::vector<std::vector<Monomial>> coords(2);
    coords[0].push_back(Monomial{{1, 1, 0}, ParamPolynomial::constant(1.0)});
    coords[1].push_back(Monomial{{0, 2, 0}, ParamPolynomial::constant(1.0)});
    const GreenEvaluator ev(FamilySpec(1, 2, FamilyKind::generic, coords), 1e-6);
    try {
      ev.value(0.0, hvec(1.0, 0.0));
      FAIL("expected DegenerateAtPoint");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateAtPoint);
    }
  }
}

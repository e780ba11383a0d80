#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "biflab/errors.hpp"
#include "biflab/rng.hpp"
#include "biflab/roots.hpp"

using namespace biflab;

namespace {

Poly from_roots(const std::vector<cplx>& roots, cplx lead = 1.0) {
  Poly p{lead};
  for (cplx r : roots) p = poly_mul(p, Poly{-r, 1.0});
  return p;
}

// Greedy matching distance between two root multisets.
double match_error(std::vector<cplx> a, std::vector<cplx> b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (cplx x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx u, cplx v) { return std::abs(u - x) < std::abs(v - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST_SUITE("roots") {
  TEST_CASE("polynomial arithmetic") {
    const Poly a{1.0, 2.0, 3.0}, b{-1.0, 1.0};
    const Poly ab = poly_mul(a, b);
    CHECK(ab.size() == 4);
    const Poly q = poly_divide(ab, b);
    REQUIRE(q.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(q[i] - a[i]) < 1e-15);
    CHECK(poly_degree(Poly{1.0, 0.0, 0.0}) == 0);
    CHECK(poly_degree(Poly{0.0}) == -1);
    CHECK(std::abs(poly_eval(a, 2.0) - 17.0) < 1e-15);
    const Poly da = poly_derivative(a);
    CHECK(std::abs(poly_eval(da, 2.0) - 14.0) < 1e-15);
  }

  TEST_CASE("random simple roots are recovered") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 1 + trial % 12;
      std::vector<cplx> roots;
      for (int i = 0; i < n; ++i) roots.push_back(complex_normal(rng) * 1.5);
      const auto found = polynomial_roots(from_roots(roots, complex_normal(rng)));
      const auto flat = expand_roots(found);
      CHECK(flat.size() == roots.size());
      CHECK(match_error(flat, roots) < 1e-9);
    }
  }

  TEST_CASE("multiple roots are merged with summed multiplicity") {
    const auto found = polynomial_roots(from_roots({1.0, 1.0, -2.0, cplx(0.0, 1.0)}));
    REQUIRE(found.size() == 3);
    int total = 0;
    for (const auto& r : found) {
      total += r.multiplicity;
      if (std::abs(r.value - 1.0) < 1e-6) CHECK(r.multiplicity == 2);
    }
    CHECK(total == 4);
  }

  TEST_CASE("zero roots are exact") {
    const auto found = polynomial_roots(Poly{0.0, 0.0, -4.0, 1.0});
    int zeros = 0;
    for (const auto& r : found)
      if (r.value == cplx(0.0)) zeros += r.multiplicity;
    CHECK(zeros == 2);
  }

  TEST_CASE("binary forms include roots at infinity") {
    // x·t (ascending in x: 0·t², 1·x t, 0·x²) has roots [0:1] and [1:0]
    const auto r = binary_form_roots(Poly{0.0, 1.0, 0.0});
    REQUIRE(r.size() == 2);
    int total = 0;
    bool zero = false, inf = false;
    for (const auto& p : r) {
      total += p.multiplicity;
      zero |= std::abs(p.point[0]) < 1e-15;
      inf |= std::abs(p.point[1]) < 1e-15;
    }
    CHECK(total == 2);
    CHECK(zero);
    CHECK(inf);
    // near-infinite root: x·(1e-12·x − t) has a root at x/t = 1e12
    const auto big = binary_form_roots(Poly{0.0, -1.0, 1e-12});
    bool found = false;
    for (const auto& p : big)
      if (std::abs(p.point[0]) > 0.5) {
        found = true;
        CHECK(std::abs(p.point[1] / p.point[0] - 1e-12) < 1e-24);
      }
    CHECK(found);
  }

  TEST_CASE("zero polynomial is rejected") {
    CHECK_THROWS_AS(polynomial_roots(Poly{0.0, 0.0}), Error);
  }
}

#include <doctest.h>

#include <cmath>

#include "biflab/critical.hpp"
#include "biflab/errors.hpp"
#include "biflab/family.hpp"
#include "biflab/family_io.hpp"
#include "biflab/rng.hpp"
#include "fixtures.hpp"

using namespace biflab;

namespace {

HVec hvec(cplx a, cplx b) {
  HVec v(2);
  v << a, b;
  return v;
}

HVec hvec(cplx a, cplx b, cplx c) {
  HVec v(3);
  v << a, b, c;
  return v;
}

FamilySpec squares(int k) {
  std::vector<std::vector<Monomial>> coords(static_cast<std::size_t>(k + 1));
  for (int i = 0; i <= k; ++i) {
    Monomial m;
    m.exponents[static_cast<std::size_t>(i)] = 2;
    m.coefficient = ParamPolynomial::constant(1.0);
    coords[static_cast<std::size_t>(i)].push_back(m);
  }
  return FamilySpec(k, 2, FamilyKind::generic, coords, "squares");
}

// Random k = 1 family of degree d with λ-linear coefficients on every monomial.
FamilySpec random_family(Rng& rng, int d) {
  std::vector<std::vector<Monomial>> coords(2);
  for (int c = 0; c < 2; ++c)
    for (int e = 0; e <= d; ++e) {
      Monomial m;
      m.exponents = {e, d - e, 0};
      m.coefficient = ParamPolynomial({complex_normal(rng), 0.3 * complex_normal(rng)});
      coords[static_cast<std::size_t>(c)].push_back(m);
    }
  return FamilySpec(1, d, FamilyKind::generic, coords);
}

}  // namespace

TEST_SUITE("family-core") {
  TEST_CASE("parameter polynomial evaluation and degree") {
    ParamPolynomial p({cplx(1.5, -2.0), 0.0, cplx(0.0, 3.0), 0.0, 0.0});
    CHECK(p.degree() == 2);
    CHECK(p(0.0) == cplx(1.5, -2.0));
    CHECK(std::abs(p(cplx(1.0, 1.0)) - (cplx(1.5, -2.0) + cplx(0.0, 3.0) * cplx(0.0, 2.0))) < 1e-15);
    CHECK(std::abs(p.derivative(2.0) - cplx(0.0, 12.0)) < 1e-15);
    CHECK(ParamPolynomial({0.0, 0.0}).degree() == -1);
  }

  TEST_CASE("evaluate_lift examples") {
    const auto sq = squares(1);
    CHECK((evaluate_lift(sq, 0.3, hvec(1.0, 1.0)) - hvec(1.0, 1.0)).norm() == 0.0);
    const auto quad = fixtures::family("quad");
    CHECK((evaluate_lift(quad, -2.0, hvec(2.0, 1.0)) - hvec(2.0, 1.0)).norm() < 1e-15);
    CHECK((evaluate_lift(quad, -2.0, hvec(0.0, 1.0)) - hvec(-2.0, 1.0)).norm() < 1e-15);
  }

  TEST_CASE("affine_map examples") {
    const auto quad = fixtures::family("quad");
    CHECK(std::abs(affine_map(quad, 0.0, cvec(0.0))[0]) == 0.0);
    CHECK(std::abs(affine_map(quad, cplx(0, 1), cvec(0.0))[0] - cplx(0, 1)) < 1e-15);
    const auto skew = fixtures::family("skew");
    CHECK((affine_map(skew, 0.0, cvec(1.0, 1.0)) - cvec(1.0, 2.0)).norm() < 1e-15);
  }

  TEST_CASE("affine_map overflows on the chart's hyperplane at infinity") {
    const auto lattes = fixtures::family("lattes");
    CHECK_THROWS_AS(affine_map(lattes, 0.0, cvec(0.0)), Error);
    try {
      affine_map(lattes, 0.0, cvec(1.0));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ChartOverflow);
    }
  }

  TEST_CASE("jacobian_lift examples") {
    CHECK(std::abs(jacobian_lift(squares(1), 0.0, hvec(1.0, 1.0)) - 4.0) < 1e-15);
    CHECK(std::abs(jacobian_lift(squares(2), 0.0, hvec(1.0, 1.0, 1.0)) - 8.0) < 1e-15);
    CHECK(std::abs(jacobian_lift(fixtures::family("quad"), 0.0, hvec(1.0, 1.0)) - 4.0) < 1e-15);
    // (x²+λt², y²+xt, t²): det [[2,0,0],[1,2,1],[0,0,2]] = 8
    CHECK(std::abs(jacobian_lift(fixtures::family("skew"), 0.0, hvec(1.0, 1.0, 1.0)) - 8.0) < 1e-15);
  }

  TEST_CASE("affine_jacobian examples") {
    const auto quad = fixtures::family("quad");
    auto j = affine_jacobian(quad, cplx(0.2, 0.1), cvec(1.0));
    CHECK(std::abs(j.det - 2.0) < 1e-15);
    CHECK(std::abs(affine_jacobian(quad, 0.5, cvec(0.0)).det) == 0.0);
    const auto skew = fixtures::family("skew");
    const cplx z(0.3, -0.7), w(1.1, 0.4);
    auto js = affine_jacobian(skew, 0.0, cvec(z, w));
    CHECK(std::abs(js.matrix(0, 0) - 2.0 * z) < 1e-14);
    CHECK(std::abs(js.matrix(0, 1)) < 1e-14);
    CHECK(std::abs(js.matrix(1, 0) - 1.0) < 1e-14);
    CHECK(std::abs(js.matrix(1, 1) - 2.0 * w) < 1e-14);
    CHECK(std::abs(js.det - 4.0 * z * w) < 1e-14);
    CHECK(std::abs(affine_jacobian(skew, 0.0, cvec(1.0, 1.0)).det - 4.0) < 1e-14);
  }

  TEST_CASE("chart jet λ-derivative matches finite differences") {
    const auto skew = fixtures::family("skew");
    const cplx lam(0.2, 0.3), h(1e-6, 0.0);
    const CVec z = cvec(cplx(0.4, 0.1), cplx(-0.3, 0.8));
    const auto jet = ChartMap(skew, lam).jet(z);
    const CVec fd = (affine_map(skew, lam + h, z) - affine_map(skew, lam - h, z)) / (2.0 * h);
    CHECK((jet.dlambda - fd).norm() < 1e-8);
  }

  TEST_CASE("homogeneity of the lift and its Jacobian") {
    Rng rng(11);
    const FamilySpec fams[] = {fixtures::family("quad"), fixtures::family("cubic"), fixtures::family("lattes"),
                               fixtures::family("skew"), fixtures::family("product")};
    for (const auto& spec : fams) {
      const int n = spec.k() + 1;
      const int jdeg = n * (spec.d() - 1);
      for (int trial = 0; trial < 100; ++trial) {
        const cplx lam = complex_normal(rng);
        const HVec z = random_unit_vector(rng, n) * uniform(rng, 0.2, 3.0);
        const cplx u = std::polar(uniform(rng, 0.3, 3.0), uniform(rng, 0.0, 6.28));
        const Lift f(spec, lam);
        const HVec lhs = f(u * z);
        const HVec rhs = std::pow(u, spec.d()) * f(z);
        CHECK((lhs - rhs).norm() / rhs.norm() <= 1e-11);
        const cplx jl = f.jacobian_det(u * z), jr = std::pow(u, jdeg) * f.jacobian_det(z);
        CHECK(std::abs(jl - jr) / std::abs(jr) <= 1e-11);
      }
    }
  }

  TEST_CASE("chart consistency: affine_map agrees with the normalized lift") {
    Rng rng(12);
    const FamilySpec fams[] = {fixtures::family("quad"), fixtures::family("lattes"), fixtures::family("skew")};
    for (const auto& spec : fams) {
      const int k = spec.k();
      for (int trial = 0; trial < 100; ++trial) {
        const cplx lam = complex_normal(rng);
        CVec z(k);
        for (int i = 0; i < k; ++i) z[i] = complex_normal(rng);
        const CVec a = affine_map(spec, lam, z);
        const CVec b = dehomogenize(evaluate_lift(spec, lam, lift_point(z)));
        CHECK((a - b).norm() <= 1e-11 * std::max(1.0, b.norm()));
        // other charts
        for (int chart = 0; chart < k; ++chart) {
          const HVec zt = lift_point(z);
          if (std::abs(zt[chart]) < 1e-3) continue;
          const HVec fz = evaluate_lift(spec, lam, zt);
          if (std::abs(fz[chart]) < 1e-3 * fz.norm()) continue;
          const CVec zc = dehomogenize(zt, chart);
          CHECK((affine_map(spec, lam, zc, chart) - dehomogenize(fz, chart)).norm() <=
                1e-11 * std::max(1.0, dehomogenize(fz, chart).norm()));
        }
      }
    }
  }

  TEST_CASE("log FS Jacobian equals the chart formula and is rotation invariant") {
    const auto quad = fixtures::family("quad");
    const cplx lam(-0.4, 0.3);
    const Lift f(quad, lam);
    for (cplx z : {cplx(0.3, 0.2), cplx(-1.7, 0.4), cplx(5.0, -3.0)}) {
      const cplx fz = z * z + lam;
      const double chart = std::log(std::abs(2.0 * z)) + std::log((1.0 + std::norm(z)) / (1.0 + std::norm(fz)));
      CHECK(std::abs(log_fs_jacobian(f, hvec(z, 1.0)) - chart) < 1e-12);
      CHECK(std::abs(log_fs_jacobian(f, hvec(z, 1.0) * cplx(2.0, -1.0)) - chart) < 1e-12);
    }
    // conjugating by the unitary swap (x,t) -> (t,x) leaves the spherical derivative unchanged
    Rng rng(5);
    const auto lattes = fixtures::family("lattes");
    const Lift g(lattes, 0.0);
    std::vector<std::vector<Monomial>> swapped(2);
    for (int c = 0; c < 2; ++c)
      for (auto m : lattes.coord(1 - c)) {
        std::swap(m.exponents[0], m.exponents[1]);
        swapped[static_cast<std::size_t>(c)].push_back(m);
      }
    const Lift h(FamilySpec(1, 4, FamilyKind::generic, swapped), 0.0);
    for (int trial = 0; trial < 20; ++trial) {
      const HVec z = random_unit_vector(rng, 2);
      CHECK(std::abs(log_fs_jacobian(g, z) - log_fs_jacobian(h, hvec(z[1], z[0]))) < 1e-10);
    }
  }

  TEST_CASE("ProjPoint normalization") {
    ProjPoint p(hvec(cplx(0.0, 3.0), cplx(-4.0, 0.0)));
    CHECK(std::abs(p.coords().norm() - 1.0) < 1e-14);
    CHECK(p.coords()[1].real() > 0.0);
    CHECK(std::abs(p.coords()[1].imag()) < 1e-15);
    ProjPoint q(hvec(cplx(0.0, 3.0), cplx(-4.0, 0.0)) * cplx(0.3, -2.0));
    CHECK(p.distance(q) < 1e-7);
    CHECK((p.coords() - q.coords()).norm() < 1e-14);
    CHECK(std::abs(ProjPoint(hvec(1.0, 0.0)).distance(ProjPoint(hvec(0.0, 1.0))) - 1.0) < 1e-15);
  }

  TEST_CASE("critical points examples") {
    const auto quad = fixtures::family("quad");
    auto cq = critical_points(quad, cplx(0.3, -0.2));
    REQUIRE(cq.size() == 1);
    CHECK(std::abs(cq[0].value) < 1e-14);
    auto all = critical_points_projective(quad, 0.7);
    int total = 0;
    for (const auto& c : all) total += c.multiplicity;
    CHECK(total == 2);
    const auto cubic = fixtures::family("cubic");
    auto cc = critical_points(cubic, -3.0);
    REQUIRE(cc.size() == 2);
    CHECK(std::min(std::abs(cc[0].value - 1.0), std::abs(cc[0].value + 1.0)) < 1e-12);
    CHECK(std::abs(cc[0].value + cc[1].value) < 1e-12);
  }

  TEST_CASE("critical count is 2d-2 for random families") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = 2 + trial % 4;
      const auto spec = random_family(rng, d);
      const cplx lam = complex_normal(rng);
      int total = 0;
      for (const auto& c : critical_points_projective(spec, lam)) {
        total += c.multiplicity;
        CHECK(std::abs(Lift(spec, lam).jacobian_det(c.point / c.point.norm())) < 1e-8);
      }
      CHECK(total == 2 * d - 2);
    }
  }

  TEST_CASE("critical point velocity matches finite differences") {
    const auto cubic = fixtures::family("cubic");
    const cplx lam(-0.8, 0.5), h(1e-6, 0.0);
    auto pick = [&](cplx l, cplx near) {
      cplx best = 0.0;
      for (const auto& c : critical_points(cubic, l))
        if (std::abs(c.value - near) < std::abs(best - near) || best == cplx(0.0)) best = c.value;
      return best;
    };
    for (const auto& c : critical_points_projective(cubic, lam)) {
      if (!c.finite()) continue;
      const cplx v = c.chart_value();
      const cplx fd = (pick(lam + h, v) - pick(lam - h, v)) / (2.0 * h);
      CHECK(std::abs(c.velocity[0] - fd) < 1e-7);
    }
  }

  TEST_CASE("critical curve samples of a skew product") {
    const auto skew = fixtures::family("skew");
    const auto samples = critical_curve_samples(skew, 0.0, 400, 3);
    CHECK(samples.size() == 400);
    int lines = 0;
    for (const auto& s : samples) {
      const auto j = affine_jacobian(skew, 0.0, s.point);
      CHECK(std::abs(j.det) <= 1e-8 * std::max(1.0, s.point.norm()));
      CHECK(s.weight > 0.0);
      // {z = 0} ∪ {w = 0}
      CHECK(std::min(std::abs(s.point[0]), std::abs(s.point[1])) < 1e-12);
      lines += s.component == 0;
    }
    CHECK(lines > 100);
    CHECK_THROWS_AS(critical_curve_samples(fixtures::family("quad"), 0.0, 3), Error);
  }

  TEST_CASE("check_nondegenerate") {
    CHECK(check_nondegenerate(squares(1), 0.0).nondegenerate);
    CHECK(check_nondegenerate(fixtures::family("skew"), 1.0).nondegenerate);
    // (x·y, y²) on P^1 vanishes at (1, 0)
    std::vector<std::vector<Monomial>> coords(2);
    coords[0].push_back(Monomial{{1, 1, 0}, ParamPolynomial::constant(1.0)});
    coords[1].push_back(Monomial{{0, 2, 0}, ParamPolynomial::constant(1.0)});
    const auto rep = check_nondegenerate(FamilySpec(1, 2, FamilyKind::generic, coords), 0.0);
    REQUIRE_FALSE(rep.nondegenerate);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->distance(ProjPoint(hvec(1.0, 0.0))) < 1e-4);
  }

  TEST_CASE("family files round-trip and reject malformed tables") {
    for (const char* name : {"quad", "cubic", "z2", "cheb", "lattes", "skew", "product"}) {
      const auto spec = fixtures::family(name);
      const auto again = parse_family(format_family(spec));
      CHECK(again.k() == spec.k());
      CHECK(again.d() == spec.d());
      CHECK(again.kind() == spec.kind());
      CHECK(format_family(again) == format_family(spec));
    }
    const auto bad_degree = "[family]\nk = 1\nd = 2\n[coord 0]\n2 1 : 1,0\n[coord 1]\n0 2 : 1,0\n";
    CHECK_THROWS_AS(parse_family(bad_degree), Error);
    const auto bad_number = "[family]\nk = 1\nd = 2\n[coord 0]\n2 0 : 1,x\n[coord 1]\n0 2 : 1,0\n";
    try {
      parse_family(bad_number);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ParseError);
    }
    const auto bad_arity = "[family]\nk = 1\nd = 2\n[coord 0]\n2 0 0 : 1,0\n[coord 1]\n0 2 : 1,0\n";
    CHECK_THROWS_AS(parse_family(bad_arity), Error);
    const auto missing = "[family]\nk = 1\nd = 2\n[coord 0]\n2 0 : 1,0\n";
    CHECK_THROWS_AS(parse_family(missing), Error);
    const auto bad_kind = "[family]\nk = 1\nd = 2\nkind = polynomial\n[coord 0]\n2 0 : 1,0\n[coord 1]\n1 1 : 1,0\n";
    CHECK_THROWS_AS(parse_family(bad_kind), Error);
  }

  TEST_CASE("parsing is bit exact") {
    const auto text = "[family]\nk = 1\nd = 2\n[coord 0]\n2 0 : 0.1,-2.5e-7 3,0\n[coord 1]\n0 2 : 1,0\n";
    const auto spec = parse_family(text);
    const auto c = spec.coord(0)[0].coefficient.coefficients();
    CHECK(c[0].real() == 0.1);
    CHECK(c[0].imag() == -2.5e-7);
    CHECK(c[1].real() == 3.0);
    CHECK(spec.lambda_independent() == false);
    CHECK(fixtures::family("z2").lambda_independent());
  }
}

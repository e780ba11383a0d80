#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "biflab/bifurcation.hpp"
#include "biflab/errors.hpp"
#include "fixtures.hpp"

using namespace biflab;

namespace {

LyapunovField synthetic(int n, double width, double (*fn)(cplx), double stderr_value = 1e-12) {
  LyapunovField f;
  f.grid = ParameterGrid{0.0, width, width, n, n};
  f.values.resize(f.grid.size());
  f.std_errors.assign(f.grid.size(), stderr_value);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) f.values[f.grid.index(i, j)] = fn(f.grid.cell(i, j));
  return f;
}

// independent oracle: affine orbit of the critical point 0 of z^2 + λ with a
// central finite difference in λ
double mass_oracle(cplx center, double radius, int n, int n_theta) {
  const double h = 1e-6;
  auto orbit = [&](cplx lam) {
    cplx z = 0.0;
    for (int m = 0; m < n; ++m) z = z * z + lam;
    return z;
  };
  double total = 0.0;
  for (int ir = 0; ir < n_theta; ++ir) {
    const double r = radius * (ir + 0.5) / n_theta;
    for (int it = 0; it < n_theta; ++it) {
      const cplx lam = center + std::polar(r, 2.0 * kPi * (it + 0.5) / n_theta);
      const cplx z = orbit(lam);
      const cplx dz = (orbit(lam + h) - orbit(lam - h)) / (2.0 * h);
      const double dens = std::norm(dz) / std::pow(1.0 + std::norm(z), 2);
      total += r * (radius / n_theta) * (2.0 * kPi / n_theta) * (1.0 + dens);
    }
  }
  return total / std::pow(2.0, n);
}

}  // namespace

TEST_SUITE("bifurcation-analysis") {
  TEST_CASE("constant field has zero density") {
    const auto d = ddc_density(synthetic(6, 1.0, [](cplx) { return 0.7; }));
    for (int j = 1; j < 5; ++j)
      for (int i = 1; i < 5; ++i) CHECK(d.values[d.grid.index(i, j)] == doctest::Approx(0.0));
    CHECK(std::isnan(d.values[d.grid.index(0, 2)]));
    for (auto m : support_mask(d)) CHECK(m == 0);
  }

  TEST_CASE("|λ|^2 has density 2/π") {
    const auto d = ddc_density(synthetic(9, 2.0, [](cplx l) { return std::norm(l); }));
    for (int j = 1; j < 8; ++j)
      for (int i = 1; i < 8; ++i) CHECK(std::abs(d.values[d.grid.index(i, j)] - 2.0 / kPi) <= 1e-10);
  }

  TEST_CASE("spike marks a single cell and missing values propagate") {
    auto f = synthetic(7, 1.0, [](cplx l) { return std::abs(l) < 1e-9 ? -1.0 : 0.0; });
    auto d = ddc_density(f);
    const auto mask = support_mask(d);
    int marked = 0;
    for (auto m : mask) marked += m;
    CHECK(marked == 1);
    CHECK(mask[d.grid.index(3, 3)] == 1);
    f.values[f.grid.index(2, 2)] = std::numeric_limits<double>::quiet_NaN();
    d = ddc_density(f);
    CHECK(std::isnan(d.values[d.grid.index(2, 3)]));
    CHECK(std::isnan(d.values[d.grid.index(2, 2)]));
    CHECK_FALSE(std::isnan(d.values[d.grid.index(4, 4)]));
  }

  TEST_CASE("grid size and threshold guards") {
    auto f = synthetic(3, 1.0, [](cplx) { return 0.0; });
    f.grid.nx = 2;
    f.values.resize(6);
    f.std_errors.resize(6);
    CHECK_THROWS_AS(ddc_density(f), Error);
    const auto d = ddc_density(synthetic(4, 1.0, [](cplx) { return 0.0; }));
    CHECK_THROWS_AS(support_mask(d, d.noise_floor), Error);
  }

  TEST_CASE("noise floor from the largest standard error") {
    const auto d = ddc_density(synthetic(10, 1.0, [](cplx) { return 0.0; }, 1e-6));
    CHECK(d.noise_floor == doctest::Approx(10.0 * 1e-6 / 0.01));
    CHECK(d.threshold == doctest::Approx(5.0 * d.noise_floor));
  }

  TEST_CASE("psh field gives nonnegative density") {
    const auto d = ddc_density(synthetic(12, 2.0, [](cplx l) { return std::log(1.0 + std::norm(l)) + std::max(0.0, l.real()); }));
    for (double v : d.values)
      if (!std::isnan(v)) CHECK(v >= -d.noise_floor);
  }

  TEST_CASE("mass growth for a parameter-free map is area times d^-n") {
    const auto rep = mass_growth(fixtures::family("z2"), 0.0, 0.1, 6, 32);
    // polar midpoint rule integrates the constant exactly
    const double area = kPi * 0.01;
    REQUIRE(rep.m_n.size() == 6);
    for (int n = 1; n <= 6; ++n) CHECK(rep.m_n[n - 1] == doctest::Approx(area * std::pow(2.0, -n)).epsilon(1e-12));
  }

  TEST_CASE("mass growth matches a finite-difference oracle") {
    const auto quad = fixtures::family("quad");
    const auto rep = mass_growth(quad, cplx(-0.7, 0.1), 0.05, 6, 10);
    for (int n = 1; n <= 6; ++n)
      CHECK(rep.m_n[n - 1] == doctest::Approx(mass_oracle(cplx(-0.7, 0.1), 0.05, n, 10)).epsilon(1e-6));
  }

  TEST_CASE("mass decreases in a stable box and stays large across the boundary") {
    const auto quad = fixtures::family("quad");
    const auto inner = mass_growth(quad, 0.0, 0.05, 20, 64);
    for (int n = 2; n <= 20; ++n) CHECK(inner.m_n[n - 1] < inner.m_n[n - 2]);
    for (cplx c : {cplx(0.25, 0.0), cplx(0.0, 1.0)}) {
      const auto outer = mass_growth(quad, c, 0.05, 20, 64);
      CHECK(*std::min_element(outer.m_n.begin(), outer.m_n.end()) >= 10.0 * inner.m_n.back());
    }
  }

  TEST_CASE("Misiurewicz parameters -2 and i") {
    const auto quad = fixtures::family("quad");
    MisiurewiczOptions opt;
    opt.n0_max = 3;
    opt.p_max = 1;
    auto hits = misiurewicz_scan(quad, ParameterGrid{-2.0, 0.2, 0.2, 5, 5}, opt);
    bool found = false;
    for (const auto& h : hits) {
      CHECK(h.residual <= 1e-9);
      CHECK(std::abs(h.transversality) >= 1e-6);
      if (std::abs(h.lambda + 2.0) < 1e-10) {
        found = true;
        CHECK(h.n0 == 2);
        CHECK(h.multiplier_modulus == doctest::Approx(4.0));
      }
    }
    CHECK(found);
    opt.n0_max = 2;
    opt.p_max = 2;
    hits = misiurewicz_scan(quad, ParameterGrid{cplx(0, 1), 0.2, 0.2, 5, 5}, opt);
    found = false;
    for (const auto& h : hits) {
      if (std::abs(h.lambda - cplx(0, 1)) < 1e-10) {
        found = true;
        CHECK(h.period == 2);
        CHECK(h.multiplier_modulus == doctest::Approx(4.0 * std::sqrt(2.0)));
      }
    }
    CHECK(found);
  }

  TEST_CASE("persistent collision yields no hits") {
    MisiurewiczOptions opt;
    const auto hits = misiurewicz_scan(fixtures::family("cheb"), ParameterGrid{0.0, 1.0, 1.0, 4, 4}, opt);
    CHECK(hits.empty());
  }

  TEST_CASE("coverage of hits by the support") {
    auto f = synthetic(9, 2.0, [](cplx l) { return std::abs(l - cplx(0.5, 0.5)) < 0.2 ? -1.0 : 0.0; });
    const auto d = ddc_density(f);
    MisiurewiczHit near_spike, far;
    near_spike.lambda = cplx(0.45, 0.6);
    far.lambda = cplx(-0.7, -0.7);
    const auto cov = misiurewicz_in_support({near_spike, far}, d, 1);
    CHECK(cov.covered[0]);
    CHECK_FALSE(cov.covered[1]);
    CHECK_FALSE(cov.all_covered);
  }
}

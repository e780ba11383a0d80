#include "biflab/critical.hpp"

#include <cmath>

#include "biflab/errors.hpp"
#include "biflab/rng.hpp"

namespace biflab {

namespace {

// Coefficients of the form `coord` in x^i t^{d-i}, with λ-derivatives.
void binary_coefficients(const FamilySpec& spec, int coord, cplx lambda, Poly& a, Poly& da) {
  a.assign(static_cast<std::size_t>(spec.d() + 1), 0.0);
  da = a;
  for (const auto& m : spec.coord(coord)) {
    const auto i = static_cast<std::size_t>(m.exponents[0]);
    a[i] += m.coefficient(lambda);
    da[i] += m.coefficient.derivative(lambda);
  }
}

// ∂/∂x and ∂/∂t of a degree-n binary form, as degree n−1 forms.
Poly form_dx(const Poly& a) {
  Poly out(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * static_cast<double>(i);
  return out;
}

Poly form_dt(const Poly& a) {
  const auto n = a.size() - 1;
  Poly out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * static_cast<double>(n - i);
  return out;
}

}  // namespace

CriticalForm critical_form(const FamilySpec& spec, cplx lambda) {
  if (spec.k() != 1) throw Error(ErrorKind::UnsupportedFamily, "critical form needs k = 1");
  Poly p, dp, q, dq;
  binary_coefficients(spec, 0, lambda, p, dp);
  binary_coefficients(spec, 1, lambda, q, dq);
  const Poly px = form_dx(p), pt = form_dt(p), qx = form_dx(q), qt = form_dt(q);
  const Poly dpx = form_dx(dp), dpt = form_dt(dp), dqx = form_dx(dq), dqt = form_dt(dq);
  CriticalForm out;
  out.value = poly_sub(poly_mul(px, qt), poly_mul(pt, qx));
  out.dlambda = poly_add(poly_sub(poly_mul(dpx, qt), poly_mul(dpt, qx)),
                         poly_sub(poly_mul(px, dqt), poly_mul(pt, dqx)));
  return out;
}

std::vector<CriticalPoint> critical_points_projective(const FamilySpec& spec, cplx lambda, const RootOptions& opt) {
  const auto form = critical_form(spec, lambda);
  if (poly_degree(form.value) < 0)
    throw Error(ErrorKind::DegenerateAtPoint, "Jacobian of the lift vanishes identically");
  const Poly rev(form.value.rbegin(), form.value.rend());
  const Poly drev(form.dlambda.rbegin(), form.dlambda.rend());
  std::vector<CriticalPoint> out;
  for (const auto& r : binary_form_roots(form.value, opt)) {
    CriticalPoint cp;
    cp.multiplicity = r.multiplicity;
    cp.velocity = HVec::Zero(2);
    cp.point = HVec(2);
    const cplx x = r.point[0], t = r.point[1];
    if (std::abs(x) <= std::abs(t)) {
      const cplx c = x / t;
      cp.point << c, 1.0;
      if (r.multiplicity == 1) {
        const cplx dj = poly_eval(poly_derivative(form.value), c);
        if (dj != cplx(0.0)) cp.velocity[0] = -poly_eval(form.dlambda, c) / dj;
      }
    } else {
      const cplx s = t / x;
      cp.point << 1.0, s;
      if (r.multiplicity == 1) {
        const cplx dj = poly_eval(poly_derivative(rev), s);
        if (dj != cplx(0.0)) cp.velocity[1] = -poly_eval(drev, s) / dj;
      }
    }
    out.push_back(cp);
  }
  return out;
}

std::vector<Root> critical_points(const FamilySpec& spec, cplx lambda, const RootOptions& opt) {
  std::vector<Root> out;
  for (const auto& cp : critical_points_projective(spec, lambda, opt))
    if (cp.finite()) out.push_back(Root{cp.chart_value(), cp.multiplicity});
  return out;
}

namespace {

// Fubini–Study area density of a parametrized curve s ↦ [Z(s)] in P^2,
// relative to Lebesgue measure in s.
double fs_area_density(const HVec& z, const HVec& dz) {
  const double n2 = z.squaredNorm();
  const double cross = dz.squaredNorm() * n2 - std::norm(z.dot(dz));
  return std::max(cross, 0.0) / (n2 * n2);
}

// Polynomial in w (ascending) of the fiber form q(z, w, 1), and its z-derivative.
void fiber_polys(const FamilySpec& spec, cplx lambda, cplx z, Poly& q, Poly& qz) {
  q.assign(static_cast<std::size_t>(spec.d() + 1), 0.0);
  qz = q;
  for (const auto& m : spec.coord(1)) {
    const int ex = m.exponents[0], ey = m.exponents[1];
    const cplx c = m.coefficient(lambda);
    q[static_cast<std::size_t>(ey)] += c * std::pow(z, ex);
    if (ex > 0) qz[static_cast<std::size_t>(ey)] += c * static_cast<double>(ex) * std::pow(z, ex - 1);
  }
}

// Spherically uniform point of C: density 1/(π(1+|z|²)²) in Lebesgue measure.
cplx spherical_point(Rng& rng) {
  const double u = uniform(rng, 1e-12, 1.0 - 1e-12);
  const double r = std::sqrt(u / (1.0 - u));
  return std::polar(r, 2.0 * kPi * uniform01(rng));
}

double spherical_pdf(cplx z) {
  const double s = 1.0 + std::norm(z);
  return 1.0 / (kPi * s * s);
}

}  // namespace

std::vector<CriticalSample> critical_curve_samples(const FamilySpec& spec, cplx lambda, int n, std::uint64_t seed) {
  if (spec.k() != 2 || spec.kind() != FamilyKind::skew)
    throw Error(ErrorKind::UnsupportedFamily, "critical curve sampling needs a k = 2 skew family");
  // base polynomial p(z, 1)
  Poly p(static_cast<std::size_t>(spec.d() + 1), 0.0);
  for (const auto& m : spec.coord(0)) p[static_cast<std::size_t>(m.exponents[0])] += m.coefficient(lambda);
  const auto base_crit = expand_roots(polynomial_roots(poly_derivative(p)));
  Rng rng(seed);
  std::vector<CriticalSample> out;
  out.reserve(static_cast<std::size_t>(n));
  const double lines = static_cast<double>(base_crit.size());
  while (static_cast<int>(out.size()) < n) {
    const bool pick_line = !base_crit.empty() && uniform01(rng) < 0.5;
    const double mix = base_crit.empty() ? 1.0 : 0.5;
    const cplx s = spherical_point(rng);
    if (pick_line) {
      const cplx c = base_crit[uniform_index(rng, base_crit.size())];
      HVec z(3), dz(3);
      z << c, s, 1.0;
      dz << 0.0, 1.0, 0.0;
      const double w = fs_area_density(z, dz) * lines / (mix * spherical_pdf(s));
      out.push_back(CriticalSample{cvec(c, s), w, 0});
      continue;
    }
    Poly q, qz;
    fiber_polys(spec, lambda, s, q, qz);
    const Poly qw = poly_derivative(q);
    const Poly qwz = poly_derivative(qz);
    const Poly qww = poly_derivative(qw);
    std::vector<cplx> ws;
    try {
      ws = expand_roots(polynomial_roots(qw));
    } catch (const Error&) {
      continue;
    }
    if (ws.empty()) continue;
    const cplx w = ws[uniform_index(rng, ws.size())];
    const cplx denom = poly_eval(qww, w);
    if (std::abs(denom) < 1e-12) continue;
    const cplx dw = -poly_eval(qwz, w) / denom;
    HVec z(3), dz(3);
    z << s, w, 1.0;
    dz << 1.0, dw, 0.0;
    const double weight = fs_area_density(z, dz) * static_cast<double>(ws.size()) / ((1.0 - mix) * spherical_pdf(s));
    out.push_back(CriticalSample{cvec(s, w), weight, 1});
  }
  return out;
}

}  // namespace biflab

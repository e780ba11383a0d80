#include "biflab/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "biflab/critical.hpp"
#include "biflab/cycles.hpp"
#include "biflab/errors.hpp"
#include "biflab/parallel.hpp"

namespace biflab {

BifurcationDensity ddc_density(const LyapunovField& field, double threshold_factor) {
  const auto& g = field.grid;
  g.validate();
  if (field.values.size() != g.size()) throw Error(ErrorKind::InvalidArgument, "field size does not match its grid");
  BifurcationDensity out;
  out.grid = g;
  out.values.assign(g.size(), std::numeric_limits<double>::quiet_NaN());
  const double hx = g.dx(), hy = g.dy();
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      const double c = field.values[g.index(i, j)];
      const double lap = (field.values[g.index(i + 1, j)] + field.values[g.index(i - 1, j)] - 2.0 * c) / (hx * hx) +
                         (field.values[g.index(i, j + 1)] + field.values[g.index(i, j - 1)] - 2.0 * c) / (hy * hy);
      out.values[g.index(i, j)] = lap / (2.0 * kPi);  // NaN neighbours propagate
    }
  }
  const double h = std::min(hx, hy);
  out.noise_floor = 10.0 * field.max_std_error() / (h * h);
  out.threshold = threshold_factor * out.noise_floor;
  return out;
}

std::vector<std::uint8_t> support_mask(const BifurcationDensity& density, double threshold) {
  if (!(threshold > density.noise_floor))
    throw Error(ErrorKind::InvalidArgument, "support threshold must exceed the noise floor");
  std::vector<std::uint8_t> mask(density.values.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = density.values[i] > threshold ? 1 : 0;
  return mask;
}

MassGrowthReport mass_growth(const FamilySpec& spec, cplx center, double radius, int n_max, int n_theta) {
  if (spec.k() != 1) throw Error(ErrorKind::UnsupportedFamily, "mass growth is implemented for k = 1");
  if (!(radius > 0.0) || n_max < 1 || n_theta < 1)
    throw Error(ErrorKind::InvalidArgument, "mass growth needs radius > 0, n_max ≥ 1, n_theta ≥ 1");
  MassGrowthReport rep;
  rep.center = center;
  rep.radius = radius;
  rep.n_theta = n_theta;
  for (int n = 1; n <= n_max; ++n) rep.n_list.push_back(n);
  const bool skip_infinity = spec.kind() == FamilyKind::polynomial;
  const std::size_t nodes = static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_theta);
  // per node: Σ_c density_n, n = 1..n_max, plus the critical count
  std::vector<std::vector<double>> sums(nodes);
  std::vector<int> counts(nodes, 0);
  parallel_for(nodes, [&](std::size_t idx) {
    const int ir = static_cast<int>(idx / static_cast<std::size_t>(n_theta));
    const int it = static_cast<int>(idx % static_cast<std::size_t>(n_theta));
    const double r = radius * (ir + 0.5) / n_theta;
    const cplx lambda = center + std::polar(r, 2.0 * kPi * (it + 0.5) / n_theta);
    const Lift lift(spec, lambda);
    std::vector<double> acc(static_cast<std::size_t>(n_max), 0.0);
    int count = 0;
    for (const auto& cp : critical_points_projective(spec, lambda)) {
      if (skip_infinity && !cp.finite()) continue;
      HVec z = cp.point, dz = cp.velocity;
      for (int m = 0; m < cp.multiplicity; ++m) ++count;
      for (int n = 1; n <= n_max; ++n) {
        const auto jet = lift.jet(z);
        HVec nz = jet.value;
        HVec ndz = jet.jacobian * dz + jet.dlambda;
        const double s = nz.norm();
        z = nz / s;
        dz = ndz / s;
        const double q = std::norm(z[0]) + std::norm(z[1]);
        const double dens = std::norm(dz[0] * z[1] - z[0] * dz[1]) / (q * q);
        acc[static_cast<std::size_t>(n - 1)] += cp.multiplicity * dens;
      }
    }
    sums[idx] = std::move(acc);
    counts[idx] = count;
  });
  rep.critical_points = counts.empty() ? 0 : counts[0];
  const double dr = radius / n_theta, dtheta = 2.0 * kPi / n_theta;
  for (int n = 1; n <= n_max; ++n) {
    double total = 0.0;
    for (std::size_t idx = 0; idx < nodes; ++idx) {
      const int ir = static_cast<int>(idx / static_cast<std::size_t>(n_theta));
      const double w = radius * (ir + 0.5) / n_theta * dr * dtheta;
      total += w * (counts[idx] + sums[idx][static_cast<std::size_t>(n - 1)]);
    }
    rep.m_n.push_back(total * std::pow(static_cast<double>(spec.d()), -n));
  }
  return rep;
}

namespace {

struct CollisionValue {
  cplx h, dh, c, gamma;
};

// h(λ) = f^{n0}_λ(c(λ)) − γ(λ) and its derivative; c and γ are followed from
// the previous values. Returns false when either cannot be continued.
bool collision(const FamilySpec& spec, cplx lambda, int n0, int period, cplx c_prev, cplx gamma_prev,
               CollisionValue& out) {
  try {
    // in the chart t = 1 the binary form is a polynomial in x
    const CriticalForm form = critical_form(spec, lambda);
    const Poly& jz = form.value;
    const Poly& jl = form.dlambda;
    const auto crit = critical_points(spec, lambda);
    if (crit.empty()) return false;
    cplx c = crit[0].value;
    for (const auto& r : crit)
      if (std::abs(r.value - c_prev) < std::abs(c - c_prev)) c = r.value;
    const cplx jd = poly_eval(poly_derivative(jz), c);
    const cplx dc = std::abs(jd) > 1e-14 ? -poly_eval(jl, c) / jd : cplx(0.0);

    const auto g = polish_periodic_point(spec, lambda, cvec(gamma_prev), period);
    if (!g) return false;
    const ChartMap f(spec, lambda);
    CMat jac = CMat::Identity(1, 1);
    CVec dl = CVec::Zero(1), y = *g;
    for (int j = 0; j < period; ++j) {
      const auto jet = f.jet(y);
      dl = jet.jacobian * dl + jet.dlambda;
      jac = jet.jacobian * jac;
      y = jet.value;
    }
    const cplx dgamma = -dl[0] / (jac(0, 0) - 1.0);

    CVec x = cvec(c);
    cplx d = dc;
    for (int j = 0; j < n0; ++j) {
      const auto jet = f.jet(x);
      d = jet.jacobian(0, 0) * d + jet.dlambda[0];
      x = jet.value;
    }
    out = {x[0] - (*g)[0], d - dgamma, c, (*g)[0]};
    return std::isfinite(std::abs(out.h)) && std::isfinite(std::abs(out.dh));
  } catch (const Error&) {
    return false;
  }
}

bool inside(const ParameterGrid& g, cplx lambda) {
  const cplx off = lambda - g.center;
  return std::abs(off.real()) <= g.width / 2.0 && std::abs(off.imag()) <= g.height / 2.0;
}

}  // namespace

std::vector<MisiurewiczHit> misiurewicz_scan(const FamilySpec& spec, const ParameterGrid& grid,
                                             const MisiurewiczOptions& opt) {
  if (spec.k() != 1) throw Error(ErrorKind::UnsupportedFamily, "Misiurewicz scans need k = 1");
  if (opt.n0_max < 1 || opt.p_max < 1) throw Error(ErrorKind::InvalidArgument, "n0_max and p_max must be positive");
  const double max_step = 2.0 * std::max(grid.dx(), grid.dy());
  std::vector<std::vector<MisiurewiczHit>> per_cell(grid.size());
  parallel_for(grid.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx % static_cast<std::size_t>(grid.nx));
    const int j = static_cast<int>(idx / static_cast<std::size_t>(grid.nx));
    const cplx start = grid.cell(i, j);
    std::vector<Root> crit;
    try {
      crit = critical_points(spec, start);
    } catch (const Error&) {
      return;
    }
    for (int p = 1; p <= opt.p_max; ++p) {
      std::vector<Cycle> cycles;
      try {
        cycles = find_cycles(spec, start, p).cycles;
      } catch (const Error&) {
        continue;
      }
      for (const auto& cyc : cycles) {
        if (cyc.classification != CycleClass::repelling) continue;
        for (const auto& pt : cyc.points) {
          for (const auto& cr : crit) {
            for (int n0 = 1; n0 <= opt.n0_max; ++n0) {
              cplx lam = start, c = cr.value, gamma = pt[0];
              CollisionValue v;
              for (int it = 0; it < opt.max_iterations; ++it) {
                if (!collision(spec, lam, n0, p, c, gamma, v) || std::abs(v.dh) == 0.0) break;
                c = v.c;
                gamma = v.gamma;
                cplx step = v.h / v.dh;
                if (std::abs(step) > max_step) step *= max_step / std::abs(step);
                lam -= step;
                if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(lam))) break;
              }
              if (!collision(spec, lam, n0, p, c, gamma, v)) continue;
              if (std::abs(v.h) > opt.residual_tol || std::abs(v.dh) < opt.transversality_min) continue;
              if (!inside(grid, lam)) continue;
              const Cycle at = make_cycle(spec, lam, cvec(v.gamma), p);
              const bool repelling = std::all_of(at.multipliers.begin(), at.multipliers.end(),
                                                 [&](cplx w) { return std::abs(w) >= 1.0 + opt.repelling_margin; });
              if (!repelling || at.residual > 1e-10) continue;
              MisiurewiczHit hit;
              hit.lambda = lam;
              hit.n0 = n0;
              hit.period = p;
              hit.residual = std::abs(v.h);
              hit.transversality = v.dh;
              hit.critical_point = v.c;
              hit.cycle_point = v.gamma;
              hit.multiplier_modulus = std::abs(at.multipliers[0]);
              per_cell[idx].push_back(hit);
            }
          }
        }
      }
    }
  });
  std::vector<MisiurewiczHit> all;
  for (auto& v : per_cell) all.insert(all.end(), v.begin(), v.end());
  std::stable_sort(all.begin(), all.end(), [](const MisiurewiczHit& a, const MisiurewiczHit& b) {
    return a.n0 != b.n0 ? a.n0 < b.n0 : a.period < b.period;
  });
  std::vector<MisiurewiczHit> out;
  for (const auto& h : all) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](const MisiurewiczHit& o) {
      return std::abs(o.lambda - h.lambda) <= opt.dedup_radius;
    });
    if (!dup) out.push_back(h);
  }
  return out;
}

SupportCoverage misiurewicz_in_support(const std::vector<MisiurewiczHit>& hits, const BifurcationDensity& density,
                                       int radius_cells, double threshold) {
  SupportCoverage rep;
  const auto& g = density.grid;
  for (const auto& h : hits) {
    const auto [ci, cj] = g.locate(h.lambda);
    bool covered = false;
    for (int j = cj - radius_cells; j <= cj + radius_cells && !covered; ++j) {
      for (int i = ci - radius_cells; i <= ci + radius_cells; ++i) {
        if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) continue;
        if (density.values[g.index(i, j)] > threshold) {
          covered = true;
          break;
        }
      }
    }
    rep.covered.push_back(covered);
    rep.all_covered = rep.all_covered && covered;
  }
  return rep;
}

}  // namespace biflab

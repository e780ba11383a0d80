#include "biflab/cycles.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "biflab/errors.hpp"
#include "biflab/sampler.hpp"

namespace biflab {

std::string_view to_string(CycleClass c) {
  switch (c) {
    case CycleClass::repelling: return "repelling";
    case CycleClass::attracting: return "attracting";
    case CycleClass::neutral: return "neutral";
    case CycleClass::saddle: return "saddle";
  }
  return "neutral";
}

CycleClass cycle_class_from_string(std::string_view s) {
  if (s == "repelling") return CycleClass::repelling;
  if (s == "attracting") return CycleClass::attracting;
  if (s == "neutral") return CycleClass::neutral;
  if (s == "saddle") return CycleClass::saddle;
  throw Error(ErrorKind::ParseError, "unknown cycle class '" + std::string(s) + "'");
}

CycleClass classify_multipliers(const std::vector<cplx>& w) {
  constexpr double margin = 1e-9;
  bool all_out = true, all_in = true, some_out = false, some_in = false;
  for (cplx m : w) {
    const double a = std::abs(m);
    all_out &= a > 1.0 + margin;
    all_in &= a < 1.0 - margin;
    some_out |= a > 1.0 + margin;
    some_in |= a < 1.0 - margin;
  }
  if (all_out) return CycleClass::repelling;
  if (all_in) return CycleClass::attracting;
  if (some_out && some_in && w.size() == 2) return CycleClass::saddle;
  return CycleClass::neutral;
}

namespace {

double scale_of(const CVec& x) { return std::max(1.0, x.norm()); }

// f^p(x), D(f^p)(x), ∂_λ f^p(x) by the chain rule.
struct IterateJet {
  CVec value;
  CMat jacobian;
  CVec dlambda;
};

IterateJet iterate_jet(const ChartMap& f, const CVec& x, int period) {
  const int k = f.k();
  IterateJet out{x, CMat::Identity(k, k), CVec::Zero(k)};
  for (int j = 0; j < period; ++j) {
    const auto jet = f.jet(out.value);
    out.dlambda = jet.jacobian * out.dlambda + jet.dlambda;
    out.jacobian = jet.jacobian * out.jacobian;
    out.value = jet.value;
  }
  return out;
}

std::vector<cplx> eigenvalues(const CMat& m) {
  if (m.rows() == 1) return {m(0, 0)};
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(Eigen::Matrix2cd(m), false);
  const auto ev = es.eigenvalues();
  std::vector<cplx> out{ev[0], ev[1]};
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  return out;
}

int mobius(int n) {
  int result = 1;
  for (int q = 2; q * q <= n; ++q) {
    if (n % q != 0) continue;
    n /= q;
    if (n % q == 0) return 0;
    result = -result;
  }
  if (n > 1) result = -result;
  return result;
}

bool has_lower_period(const ChartMap& f, const CVec& x, int period) {
  for (int q = 1; q < period; ++q) {
    if (period % q != 0) continue;
    CVec y = x;
    for (int j = 0; j < q; ++j) y = f(y);
    if ((y - x).norm() <= 1e-8 * scale_of(x)) return true;
  }
  return false;
}

}  // namespace

CMat cycle_derivative(const FamilySpec& spec, cplx lambda, const CVec& x, int period) {
  return iterate_jet(ChartMap(spec, lambda), x, period).jacobian;
}

Cycle make_cycle(const FamilySpec& spec, cplx lambda, const CVec& x, int period) {
  const ChartMap f(spec, lambda);
  Cycle c;
  c.lambda = lambda;
  c.period = period;
  CVec y = x;
  for (int j = 0; j < period; ++j) {
    c.points.push_back(y);
    y = f(y);
  }
  c.residual = 0.0;
  for (const auto& pt : c.points) {
    CVec z = pt;
    for (int j = 0; j < period; ++j) z = f(z);
    c.residual = std::max(c.residual, (z - pt).norm() / scale_of(pt));
  }
  c.multipliers = eigenvalues(iterate_jet(f, x, period).jacobian);
  c.classification = classify_multipliers(c.multipliers);
  return c;
}

std::optional<CVec> polish_periodic_point(const FamilySpec& spec, cplx lambda, const CVec& x0, int period,
                                          int max_iterations) {
  const ChartMap f(spec, lambda);
  const int k = spec.k();
  CVec x = x0;
  try {
    for (int it = 0; it < max_iterations; ++it) {
      const auto j = iterate_jet(f, x, period);
      const CVec g = j.value - x;
      const CMat dg = j.jacobian - CMat::Identity(k, k);
      const CVec step = dg.fullPivLu().solve(g);
      if (!step.allFinite()) return std::nullopt;
      x -= step;
      if (step.norm() <= 1e-15 * scale_of(x)) break;
    }
    CVec z = x;
    for (int j = 0; j < period; ++j) z = f(z);
    if (!z.allFinite() || (z - x).norm() > 1e-10 * scale_of(x)) return std::nullopt;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ChartOverflow) return std::nullopt;
    throw;
  }
  return x;
}

Poly dynatomic_polynomial(const FamilySpec& spec, cplx lambda, int period) {
  if (spec.k() != 1) throw Error(ErrorKind::UnsupportedFamily, "dynatomic polynomials need k = 1");
  if (period < 1) throw Error(ErrorKind::InvalidArgument, "period must be positive");
  const int d = spec.d();
  Poly p(static_cast<std::size_t>(d + 1), 0.0), q = p;
  for (const auto& m : spec.coord(0)) p[static_cast<std::size_t>(m.exponents[0])] += m.coefficient(lambda);
  for (const auto& m : spec.coord(1)) q[static_cast<std::size_t>(m.exponents[0])] += m.coefficient(lambda);
  // homogeneous iterates (P_n, Q_n) as x-ascending binary forms
  std::vector<std::pair<Poly, Poly>> iter{{p, q}};
  for (int n = 1; n < period; ++n) {
    const auto& [pn, qn] = iter.back();
    std::vector<Poly> pp{Poly{1.0}}, qp{Poly{1.0}};
    for (int i = 1; i <= d; ++i) {
      pp.push_back(poly_mul(pp.back(), pn));
      qp.push_back(poly_mul(qp.back(), qn));
    }
    Poly np, nq;
    for (int i = 0; i <= d; ++i) {
      const Poly term = poly_mul(pp[static_cast<std::size_t>(i)], qp[static_cast<std::size_t>(d - i)]);
      np = poly_add(np, poly_scale(term, p[static_cast<std::size_t>(i)]));
      nq = poly_add(nq, poly_scale(term, q[static_cast<std::size_t>(i)]));
    }
    iter.emplace_back(std::move(np), std::move(nq));
  }
  Poly num{1.0}, den{1.0};
  for (int s = 1; s <= period; ++s) {
    if (period % s != 0) continue;
    const int mu = mobius(period / s);
    if (mu == 0) continue;
    const auto& [ps, qs] = iter[static_cast<std::size_t>(s - 1)];
    Poly zq(qs.size() + 1, 0.0);
    for (std::size_t i = 0; i < qs.size(); ++i) zq[i + 1] = qs[i];
    Poly ns = poly_sub(ps, zq);
    ns.resize(static_cast<std::size_t>(std::max(poly_degree(ns), 0) + 1));
    if (mu > 0) num = poly_mul(num, ns);
    else den = poly_mul(den, ns);
  }
  Poly out = poly_divide(num, den);
  out.resize(static_cast<std::size_t>(std::max(poly_degree(out), 0) + 1));
  return out;
}

namespace {

CycleEnumeration cycles_k1(const FamilySpec& spec, cplx lambda, int period) {
  const ChartMap f(spec, lambda);
  const Poly phi = dynatomic_polynomial(spec, lambda, period);
  CycleEnumeration out;
  if (poly_degree(phi) < 1) return out;
  RootOptions ro;
  ro.residual_tol = 1e-7;
  const auto roots = polynomial_roots(phi, ro);
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    CVec x = cvec(roots[i].value);
    if (auto polished = polish_periodic_point(spec, lambda, x, period)) {
      if ((*polished - x).norm() < 1e-6 * scale_of(x)) x = *polished;
    }
    if (has_lower_period(f, x, period)) continue;
    Cycle c = make_cycle(spec, lambda, x, period);
    for (std::size_t j = 1; j < c.points.size(); ++j) {
      double best = 1e-6 * scale_of(c.points[j]);
      std::size_t which = roots.size();
      for (std::size_t r = 0; r < roots.size(); ++r) {
        if (used[r]) continue;
        const double dist = std::abs(roots[r].value - c.points[j][0]);
        if (dist < best) {
          best = dist;
          which = r;
        }
      }
      if (which < roots.size()) used[which] = true;
    }
    out.cycles.push_back(std::move(c));
  }
  return out;
}

CycleEnumeration cycles_k2(const FamilySpec& spec, cplx lambda, int period, std::uint64_t seed, int starts) {
  const ChartMap f(spec, lambda);
  CycleEnumeration out;
  out.complete = false;
  WalkOptions wo;
  wo.n_samples = starts;
  wo.burn_in = 50;
  wo.seed = seed;
  const auto cloud = backward_walk(spec, lambda, wo);
  std::vector<CVec> known;
  for (std::size_t s = 0; s < cloud.points.size(); ++s) {
    CVec x;
    try {
      x = cloud.chart_point(s);
    } catch (const Error&) {
      continue;
    }
    auto polished = polish_periodic_point(spec, lambda, x, period);
    if (!polished) continue;
    x = *polished;
    const bool seen = std::any_of(known.begin(), known.end(),
                                  [&](const CVec& y) { return (y - x).norm() <= 1e-8 * scale_of(x); });
    if (seen || has_lower_period(f, x, period)) continue;
    Cycle c = make_cycle(spec, lambda, x, period);
    known.insert(known.end(), c.points.begin(), c.points.end());
    out.cycles.push_back(std::move(c));
  }
  return out;
}

}  // namespace

CycleEnumeration find_cycles(const FamilySpec& spec, cplx lambda, int period, std::uint64_t seed, int starts) {
  if (period < 1) throw Error(ErrorKind::InvalidArgument, "period must be positive");
  if (spec.k() == 1) return cycles_k1(spec, lambda, period);
  return cycles_k2(spec, lambda, period, seed, starts);
}

std::vector<cplx> segment_path(cplx from, cplx to, int n) {
  std::vector<cplx> out;
  for (int i = 0; i <= n; ++i) out.push_back(from + (to - from) * (static_cast<double>(i) / n));
  return out;
}

namespace {

std::vector<int> sides(const Cycle& c) {
  std::vector<int> s;
  for (cplx w : c.multipliers) s.push_back(std::abs(w) > 1.0 ? 1 : -1);
  return s;
}

// dx/dλ of the periodic point x (implicit function theorem).
CVec point_velocity(const FamilySpec& spec, cplx lambda, const CVec& x, int period) {
  const auto j = iterate_jet(ChartMap(spec, lambda), x, period);
  const int k = spec.k();
  return -(j.jacobian - CMat::Identity(k, k)).fullPivLu().solve(j.dlambda);
}

// Distance from x to the nearest point of the cycle's orbit, and its index.
std::pair<double, std::size_t> orbit_distance(const Cycle& c, const CVec& x) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t which = 0;
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const double dist = (c.points[i] - x).norm();
    if (dist < best) {
      best = dist;
      which = i;
    }
  }
  return {best, which};
}

// Cycle of the given period at λ whose orbit passes closest to x, rotated so
// that points[0] is the closest point (k = 1, exact enumeration).
std::optional<Cycle> nearest_cycle(const FamilySpec& spec, cplx lambda, const CVec& x, int period) {
  std::optional<Cycle> best;
  double best_dist = std::numeric_limits<double>::infinity();
  try {
    for (const auto& c : find_cycles(spec, lambda, period).cycles) {
      const auto [dist, idx] = orbit_distance(c, x);
      if (dist < best_dist) {
        best_dist = dist;
        best = make_cycle(spec, lambda, c.points[idx], period);
      }
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return best;
}

}  // namespace

CycleTrack continue_cycle(const FamilySpec& spec, const Cycle& start, const std::vector<cplx>& path,
                          const TrackOptions& opt) {
  if (path.empty()) throw Error(ErrorKind::InvalidArgument, "empty continuation path");
  const int period = start.period;
  CycleTrack track;
  CVec x = start.points.at(0);
  if (std::abs(path[0] - start.lambda) > 0.0) {
    auto p = polish_periodic_point(spec, path[0], x, period);
    if (!p) throw Error(ErrorKind::InvalidArgument, "start cycle does not persist at the first path node");
    x = *p;
  }
  Cycle current = make_cycle(spec, path[0], x, period);
  track.lambdas.push_back(path[0]);
  track.cycles.push_back(current);
  auto fail = [&](const std::string& reason, cplx from, cplx to) {
    track.broken = true;
    track.break_reason = reason;
    track.bracket = std::make_pair(from, to);
    track.bracket_cycle = current;
  };
  for (std::size_t seg = 1; seg < path.size(); ++seg) {
    const cplx a = path[seg - 1], b = path[seg];
    const double len = std::abs(b - a);
    double s = 0.0, h = std::min(opt.initial_step, 1.0);
    while (s < 1.0) {
      h = std::min(h, 1.0 - s);
      const cplx lam0 = a + (b - a) * s;
      const cplx lam1 = (s + h >= 1.0) ? b : a + (b - a) * (s + h);
      const cplx dl = lam1 - lam0;
      CVec v0;
      try {
        v0 = point_velocity(spec, lam0, x, period);
      } catch (const Error&) {
        v0 = CVec::Zero(spec.k());
      }
      if (!v0.allFinite()) v0 = CVec::Zero(spec.k());
      const CVec pred = x + dl * v0;
      std::optional<CVec> next;
      // Newton corrector with a contraction test against branch jumping
      try {
        const ChartMap f(spec, lam1);
        CVec y = pred;
        double prev = std::numeric_limits<double>::infinity();
        const double first_bound = std::max(0.5 * std::abs(dl) * v0.norm(), 1e-9 * scale_of(pred));
        for (int it = 0; it < 12; ++it) {
          const auto j = iterate_jet(f, y, period);
          const CVec step = (j.jacobian - CMat::Identity(spec.k(), spec.k())).fullPivLu().solve(j.value - y);
          if (!step.allFinite()) break;
          const double sn = step.norm();
          if ((it == 0 && sn > first_bound) || (it > 0 && sn > 0.5 * prev && sn > 1e-14 * scale_of(y))) break;
          y -= step;
          prev = sn;
          if (sn <= 1e-15 * scale_of(y)) break;
        }
        CVec z = y;
        for (int j = 0; j < period; ++j) z = f(z);
        if (y.allFinite() && (z - y).norm() <= 1e-10 * scale_of(y) && prev < 1e-8 * scale_of(y)) next = y;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ChartOverflow) throw;
      }
      if (!next && spec.k() == 1) {
        // across a fold Newton started on a real slice cannot leave it
        if (auto c = nearest_cycle(spec, lam1, pred, period)) {
          const double bound = std::max(10.0 * std::abs(dl) * v0.norm(), 1e-6);
          if ((c->points[0] - pred).norm() <= bound) next = c->points[0];
        }
      }
      if (!next) {
        h /= 2.0;
        if (h * len < opt.min_step) {
          fail("step floor reached", lam0, lam0 + (b - a) * (2.0 * h));
          return track;
        }
        continue;
      }
      const Cycle cand = make_cycle(spec, lam1, *next, period);
      if (sides(cand) != sides(current)) {
        fail("multiplier modulus crossed 1", lam0, lam1);
        return track;
      }
      CVec v1;
      try {
        v1 = point_velocity(spec, lam1, *next, period);
      } catch (const Error&) {
        v1 = v0;
      }
      const double disp = (*next - x).norm();
      const double denom = std::abs(dl) * std::max(v0.norm(), v1.allFinite() ? v1.norm() : 0.0);
      track.max_displacement = std::max(track.max_displacement, disp);
      if (denom > 0.0) track.max_displacement_ratio = std::max(track.max_displacement_ratio, disp / denom);
      x = *next;
      current = cand;
      s += h;
      if (s >= 1.0 - 1e-15) s = 1.0;
      h = std::min(2.0 * h, opt.initial_step);
    }
    track.lambdas.push_back(b);
    track.cycles.push_back(current);
  }
  return track;
}

namespace {

// |w_j| − 1 for the cycle at λ nearest to the reference orbit.
struct SideEval {
  double excess = 0.0;
  Cycle cycle;
};

std::optional<SideEval> side_at(const FamilySpec& spec, cplx lambda, const Cycle& ref, std::size_t j) {
  std::optional<Cycle> c;
  if (spec.k() == 1) {
    c = nearest_cycle(spec, lambda, ref.points[0], ref.period);
  } else if (auto p = polish_periodic_point(spec, lambda, ref.points[0], ref.period)) {
    c = make_cycle(spec, lambda, *p, ref.period);
  }
  if (!c || j >= c->multipliers.size()) return std::nullopt;
  return SideEval{std::abs(c->multipliers[j]) - 1.0, *c};
}

}  // namespace

std::vector<CrossingEvent> crossing_detect(const FamilySpec& spec, const CycleTrack& track, const CrossingOptions& opt) {
  std::vector<CrossingEvent> events;
  if (!track.bracket || !track.bracket_cycle) return events;
  const Cycle& before = *track.bracket_cycle;
  cplx a = track.bracket->first, b = track.bracket->second;
  CrossingEvent ev;
  // the last good node may already sit on the crossing (a path node at λ*)
  std::optional<std::size_t> neutral_at_a;
  for (std::size_t j = 0; j < before.multipliers.size(); ++j)
    if (std::abs(std::abs(before.multipliers[j]) - 1.0) <= 1e-8) neutral_at_a = j;
  auto sb = side_at(spec, b, before, 0);
  // find the multiplier index whose side differs across the bracket
  std::size_t idx = 0;
  bool found = false;
  if (sb) {
    for (std::size_t j = 0; j < before.multipliers.size() && j < sb->cycle.multipliers.size(); ++j) {
      const bool in_a = std::abs(before.multipliers[j]) > 1.0;
      const bool in_b = std::abs(sb->cycle.multipliers[j]) > 1.0;
      if (in_a != in_b) {
        idx = j;
        found = true;
        break;
      }
    }
  }
  if (!found && !neutral_at_a) return events;
  if (!found) idx = *neutral_at_a;
  const double mod_before = std::abs(before.multipliers[idx]);
  const double mod_after = sb ? std::abs(sb->cycle.multipliers[idx]) : mod_before;
  auto sa = side_at(spec, a, before, idx);
  if (neutral_at_a && *neutral_at_a == idx) sa = SideEval{mod_before - 1.0, before};
  if (!sa) return events;
  const bool a_positive = sa->excess > 0.0;
  Cycle ref = sa->cycle;
  SideEval at = *sa;
  cplx mid = a;
  for (int it = 0; it < 200 && std::abs(at.excess) > 1e-8; ++it) {
    mid = 0.5 * (a + b);
    auto sm = side_at(spec, mid, ref, idx);
    if (!sm) break;
    at = *sm;
    if (std::abs(sm->excess) <= 1e-8) break;
    if ((sm->excess > 0.0) == a_positive) {
      a = mid;
      ref = sm->cycle;
    } else {
      b = mid;
    }
    if (std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  ev.lambda = mid;
  ev.multiplier_index = static_cast<int>(idx);
  ev.modulus_before = mod_before;
  ev.modulus_after = mod_after;
  ev.modulus_at = std::abs(at.cycle.multipliers[idx]);
  ev.cycle = at.cycle;
  if (opt.julia_flags) {
    const cplx dir = (track.bracket->second - track.bracket->first) / std::abs(track.bracket->second - track.bracket->first);
    auto flag = [&](cplx lam) {
      auto s = side_at(spec, lam, ev.cycle, idx);
      if (!s) return false;
      WalkOptions wo;
      wo.n_samples = opt.cloud_samples;
      wo.seed = opt.seed;
      const auto cloud = backward_walk(spec, lam, wo);
      return julia_membership(cloud, s->cycle.points[0], opt.julia_eps);
    };
    ev.in_julia_before = flag(mid - dir * opt.path_step);
    ev.in_julia_after = flag(mid + dir * opt.path_step);
    ev.julia_checked = true;
  }
  events.push_back(ev);
  return events;
}

}  // namespace biflab

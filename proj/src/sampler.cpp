#include "biflab/sampler.hpp"

#include <cmath>

#include "biflab/errors.hpp"
#include "biflab/parallel.hpp"
#include "biflab/rng.hpp"

namespace biflab {

namespace {

constexpr double kPreimageTol = 1e-9;

double chordal(const HVec& a, const HVec& b) {
  const HVec u = a / a.norm(), v = b / b.norm();
  return (v - u * u.dot(v)).norm();
}

}  // namespace

PreimageSolver::PreimageSolver(const FamilySpec& spec, cplx lambda)
    : k_(spec.k()), d_(spec.d()), lift_(spec, lambda) {
  const auto n = static_cast<std::size_t>(d_ + 1);
  if (k_ == 1) {
    p_.assign(n, 0.0);
    q_.assign(n, 0.0);
    for (const auto& m : spec.coord(0)) p_[static_cast<std::size_t>(m.exponents[0])] += m.coefficient(lambda);
    for (const auto& m : spec.coord(1)) q_[static_cast<std::size_t>(m.exponents[0])] += m.coefficient(lambda);
    return;
  }
  if (spec.kind() != FamilyKind::skew)
    throw Error(ErrorKind::UnsupportedFamily, "preimages of a generic k = 2 family are not supported");
  p_.assign(n, 0.0);
  for (const auto& m : spec.coord(0)) p_[static_cast<std::size_t>(m.exponents[0])] += m.coefficient(lambda);
  fiber_.assign(n, Poly(n, 0.0));
  for (const auto& m : spec.coord(1))
    fiber_[static_cast<std::size_t>(m.exponents[0])][static_cast<std::size_t>(m.exponents[1])] += m.coefficient(lambda);
  a_ = spec.infinity_coefficient(lambda);
  if (a_ == cplx(0.0)) throw Error(ErrorKind::DegenerateAtPoint, "skew family degenerates at this parameter");
}

std::vector<HVec> PreimageSolver::operator()(const HVec& target) const {
  std::vector<HVec> out;
  out.reserve(static_cast<std::size_t>(k_ == 1 ? d_ : d_ * d_));
  if (k_ == 1) {
    const HVec u = target / target.norm();
    Poly form(p_.size());
    for (std::size_t i = 0; i < p_.size(); ++i) form[i] = u[1] * p_[i] - u[0] * q_[i];
    for (const auto& r : binary_form_roots(form)) {
      if (chordal(lift_(r.point), u) > kPreimageTol)
        throw Error(ErrorKind::RootFindingFailure, "preimage misses its target");
      for (int m = 0; m < r.multiplicity; ++m) out.push_back(r.point);
    }
    return out;
  }
  if (std::abs(target[2]) < 1e-300 * target.norm())
    throw Error(ErrorKind::ChartOverflow, "target on the invariant line at infinity");
  const cplx z = target[0] / target[2];
  const cplx w = target[1] / target[2];
  Poly base = p_;
  base[0] -= a_ * z;
  for (const auto& xr : polynomial_roots(base)) {
    const cplx x = xr.value;
    Poly fib(static_cast<std::size_t>(d_ + 1), 0.0);
    cplx xp = 1.0;
    for (std::size_t ex = 0; ex < fiber_.size(); ++ex, xp *= x)
      for (std::size_t ey = 0; ey < fiber_[ex].size(); ++ey) fib[ey] += fiber_[ex][ey] * xp;
    fib[0] -= a_ * w;
    for (const auto& yr : polynomial_roots(fib)) {
      HVec pt(3);
      pt << x, yr.value, 1.0;
      const HVec img = lift_(pt);
      const double scale = std::max(1.0, std::abs(z) + std::abs(w));
      if (std::abs(img[0] / img[2] - z) + std::abs(img[1] / img[2] - w) > kPreimageTol * scale)
        throw Error(ErrorKind::RootFindingFailure, "preimage misses its target");
      pt /= pt.norm();
      for (int m = 0; m < xr.multiplicity * yr.multiplicity; ++m) out.push_back(pt);
    }
  }
  return out;
}

std::vector<CVec> all_preimages(const FamilySpec& spec, cplx lambda, const CVec& z) {
  const PreimageSolver solve(spec, lambda);
  std::vector<CVec> out;
  for (const auto& w : solve(lift_point(z))) out.push_back(dehomogenize(w));
  return out;
}

namespace {

std::vector<HVec> run_chain(const PreimageSolver& solve, const HVec& start, int n_samples, int burn_in,
                            std::uint64_t seed, int& rebranched) {
  Rng rng(seed);
  std::vector<HVec> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  HVec current = start / start.norm();
  std::vector<HVec> choices = solve(current);
  const long total = static_cast<long>(burn_in) + n_samples;
  for (long step = 0; step < total; ++step) {
    // try branches in random order until one has resolvable preimages
    std::vector<HVec> next;
    HVec chosen;
    for (int attempt = 0;; ++attempt) {
      chosen = choices[uniform_index(rng, choices.size())];
      try {
        next = solve(chosen);
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::RootFindingFailure || attempt > 50) throw;
        ++rebranched;
      }
    }
    current = chosen;
    choices = std::move(next);
    if (step >= burn_in) out.push_back(current);
  }
  return out;
}

}  // namespace

MeasureCloud backward_walk(const FamilySpec& spec, cplx lambda, const WalkOptions& opt) {
  if (opt.n_samples < 0 || opt.burn_in < 0 || opt.chains < 1)
    throw Error(ErrorKind::InvalidArgument, "walk needs n_samples >= 0, burn_in >= 0, chains >= 1");
  const PreimageSolver solve(spec, lambda);
  const int k = spec.k();
  MeasureCloud cloud;
  cloud.lambda = lambda;
  cloud.k = k;
  cloud.n_samples = opt.n_samples;
  cloud.burn_in = opt.burn_in;
  cloud.seed = opt.seed;
  cloud.chains = opt.chains;
  const auto chains = static_cast<std::size_t>(opt.chains);
  std::vector<std::vector<HVec>> parts(chains);
  std::vector<int> rebranched(chains, 0);
  parallel_for(chains, [&](std::size_t c) {
    const std::uint64_t seed = opt.seed + c;
    HVec start;
    if (opt.start) {
      start = lift_point(*opt.start);
    } else {
      Rng rng(splitmix64(seed));
      CVec z0(k);
      for (int i = 0; i < k; ++i) z0[i] = std::polar(uniform(rng, 0.5, 2.0), uniform(rng, 0.0, 2.0 * kPi));
      start = lift_point(z0);
    }
    const int share = opt.n_samples / opt.chains + (static_cast<int>(c) < opt.n_samples % opt.chains ? 1 : 0);
    parts[c] = run_chain(solve, start, share, opt.burn_in, seed, rebranched[c]);
  });
  cloud.points.reserve(static_cast<std::size_t>(opt.n_samples));
  for (std::size_t c = 0; c < chains; ++c) {
    cloud.points.insert(cloud.points.end(), parts[c].begin(), parts[c].end());
    cloud.rebranched += rebranched[c];
  }
  return cloud;
}

bool julia_membership(const MeasureCloud& cloud, const CVec& z, double eps) {
  const double eps2 = eps * eps;
  for (const auto& p : cloud.points) {
    const cplx t = p[p.size() - 1];
    if (std::abs(t) < 1e-300) continue;
    double dist2 = 0.0;
    for (int i = 0; i < z.size(); ++i) dist2 += std::norm(p[i] / t - z[i]);
    if (dist2 <= eps2) return true;
  }
  return false;
}

}  // namespace biflab

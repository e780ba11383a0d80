#include "biflab/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "biflab/errors.hpp"
#include "biflab/rng.hpp"
#include "biflab/sampler.hpp"

namespace biflab {

namespace {

struct Ambiguous {};

// Preimage of target nearest to hint; throws Ambiguous when the two nearest
// preimages are within 1e-9 of each other.
cplx nearest_preimage(const FamilySpec& spec, cplx lambda, cplx target, cplx hint) {
  const auto pre = all_preimages(spec, lambda, cvec(target));
  double best = std::numeric_limits<double>::infinity(), second = best;
  cplx pick = 0.0, runner = 0.0;
  for (const auto& y : pre) {
    const double dist = std::abs(y[0] - hint);
    if (dist < best) {
      second = best;
      runner = pick;
      best = dist;
      pick = y[0];
    } else if (dist < second) {
      second = dist;
      runner = y[0];
    }
  }
  if (pre.size() > 1 && std::abs(pick - runner) <= 1e-9) throw Ambiguous{};
  return pick;
}

// Branch of f^{-1} through the orbit point `from` (image `image`), applied to
// target by Newton. The result must stay closer to `from` than half the gap to
// the sibling preimages.
cplx pull_back(const ChartMap& f, cplx from, cplx target, double sibling_gap) {
  CVec y = cvec(from);
  for (int it = 0; it < 50; ++it) {
    const auto jet = f.jet(y);
    const cplx step = (jet.value[0] - target) / jet.jacobian(0, 0);
    y[0] -= step;
    if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(y[0]))) break;
  }
  if (!y.allFinite() || std::abs(y[0] - from) >= 0.5 * sibling_gap) throw Ambiguous{};
  return y[0];
}

ContractionReport attempt(const FamilySpec& spec, const ContractionOptions& opt, std::uint64_t seed) {
  const int p = opt.period;
  ContractionReport rep;
  rep.seed = seed;
  for (int j = -1; j <= 1; ++j)
    for (int i = -1; i <= 1; ++i) rep.lattice.push_back(opt.center + opt.window_radius * cplx(i, j));
  const std::size_t nl = rep.lattice.size();
  const std::size_t c = 4;  // lattice index of the center

  WalkOptions wo;
  wo.n_samples = 1;
  wo.burn_in = opt.burn_in;
  wo.seed = seed;
  const auto cloud = backward_walk(spec, opt.center, wo);
  const cplx start = cloud.chart_point(0)[0];

  // orbit[l][m]: m-th backward step (single f) at lattice parameter l
  std::vector<std::vector<cplx>> orbit(nl, std::vector<cplx>{start});
  Rng rng(splitmix64(seed ^ 0x5bd1e995ULL));
  const int steps = opt.depth * p;
  for (int m = 1; m <= steps; ++m) {
    const cplx prev = orbit[c].back();
    const auto pre = all_preimages(spec, opt.center, cvec(prev));
    const cplx next = pre[uniform_index(rng, pre.size())][0];
    for (const auto& y : pre)
      if (y[0] != next && std::abs(y[0] - next) <= 1e-9) throw Ambiguous{};
    orbit[c].push_back(next);
    for (std::size_t l = 0; l < nl; ++l) {
      if (l == c) continue;
      orbit[l].push_back(nearest_preimage(spec, rep.lattice[l], orbit[l].back(), next));
    }
  }
  for (int n = 0; n <= opt.depth; ++n) rep.orbit.push_back(orbit[c][static_cast<std::size_t>(n * p)]);

  // r_p at each depth
  std::vector<ChartMap> maps;
  for (cplx lam : rep.lattice) maps.emplace_back(spec, lam);
  std::vector<double> rp(static_cast<std::size_t>(opt.depth) + 1, std::numeric_limits<double>::infinity());
  for (int n = 1; n <= opt.depth; ++n) {
    for (std::size_t l = 0; l < nl; ++l) {
      cplx deriv = 1.0;
      for (int s = 0; s < p; ++s) {
        const cplx x = orbit[l][static_cast<std::size_t>(n * p - s)];
        deriv *= maps[l].jet(cvec(x)).jacobian(0, 0);
      }
      rp[static_cast<std::size_t>(n)] = std::min(rp[static_cast<std::size_t>(n)], std::norm(deriv));
    }
  }

  // probe pairs around γ_0
  std::vector<std::pair<cplx, cplx>> probes;
  for (int i = 0; i < opt.probes; ++i) {
    const cplx a = start + opt.probe_radius * std::sqrt(uniform01(rng)) * std::polar(1.0, 2.0 * kPi * uniform01(rng));
    const cplx b = start + opt.probe_radius * std::sqrt(uniform01(rng)) * std::polar(1.0, 2.0 * kPi * uniform01(rng));
    probes.emplace_back(a, b);
  }
  std::vector<double> lip(static_cast<std::size_t>(opt.depth) + 1, 0.0);
  for (std::size_t l = 0; l < nl; ++l) {
    // sibling gaps along this lattice orbit
    std::vector<double> gap(static_cast<std::size_t>(steps) + 1, std::numeric_limits<double>::infinity());
    for (int m = 1; m <= steps; ++m) {
      const auto pre = all_preimages(spec, rep.lattice[l], cvec(orbit[l][static_cast<std::size_t>(m - 1)]));
      for (const auto& y : pre) {
        const double dist = std::abs(y[0] - orbit[l][static_cast<std::size_t>(m)]);
        if (dist > 1e-9) gap[static_cast<std::size_t>(m)] = std::min(gap[static_cast<std::size_t>(m)], dist);
      }
    }
    for (const auto& [a0, b0] : probes) {
      const double d0 = std::abs(a0 - b0);
      if (d0 == 0.0) continue;
      cplx a = a0, b = b0;
      for (int m = 1; m <= steps; ++m) {
        const cplx from = orbit[l][static_cast<std::size_t>(m)];
        a = pull_back(maps[l], from, a, gap[static_cast<std::size_t>(m)]);
        b = pull_back(maps[l], from, b, gap[static_cast<std::size_t>(m)]);
        if (m % p == 0) {
          auto& slot = lip[static_cast<std::size_t>(m / p)];
          slot = std::max(slot, std::abs(a - b) / d0);
        }
      }
    }
  }

  const double factor = std::exp(opt.tau + opt.epsilon / 3.0);
  double bound = 1.0;
  for (int n = 1; n <= opt.depth; ++n) {
    bound *= factor / std::sqrt(rp[static_cast<std::size_t>(n)]);
    ContractionRow row{n, rp[static_cast<std::size_t>(n)], bound, lip[static_cast<std::size_t>(n)]};
    rep.within_bound &= row.measured_lip <= row.bound;
    rep.rows.push_back(row);
  }

  // least squares log(lip) = c − A·n
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(rep.rows.size());
  for (const auto& r : rep.rows) {
    const double x = r.n, y = std::log(r.measured_lip);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  rep.fitted_rate = -slope;
  rep.fitted_log_constant = (sy - slope * sx) / cnt;
  return rep;
}

}  // namespace

ContractionReport contraction_report(const FamilySpec& spec, const ContractionOptions& opt) {
  if (spec.k() != 1) throw Error(ErrorKind::UnsupportedFamily, "contraction reports need k = 1");
  if (opt.depth < 2 || opt.period < 1 || opt.probes < 1 || !(opt.probe_radius > 0.0))
    throw Error(ErrorKind::InvalidArgument, "contraction report needs depth ≥ 2, period ≥ 1 and probes");
  for (int r = 0; r <= opt.max_resamples; ++r) {
    try {
      auto rep = attempt(spec, opt, opt.seed + static_cast<std::uint64_t>(r));
      rep.resamples = r;
      return rep;
    } catch (const Ambiguous&) {
    }
  }
  throw Error(ErrorKind::BranchAmbiguity, "every resampled orbit hit a branch collision");
}

}  // namespace biflab

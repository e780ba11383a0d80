#include "biflab/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

#include "biflab/cycles.hpp"
#include "biflab/errors.hpp"

namespace biflab {

namespace {

double scale_of(const CVec& x) { return std::max(1.0, x.norm()); }

CVec iterate(const ChartMap& f, CVec x, int n) {
  for (int j = 0; j < n; ++j) x = f(x);
  return x;
}

struct PowerJet {
  CVec value;
  CMat jacobian;
  CVec dlambda;
};

PowerJet power_jet(const ChartMap& f, const CVec& x, int q) {
  const int k = f.k();
  PowerJet out{x, CMat::Identity(k, k), CVec::Zero(k)};
  for (int j = 0; j < q; ++j) {
    const auto jet = f.jet(out.value);
    out.dlambda = jet.jacobian * out.dlambda + jet.dlambda;
    out.jacobian = jet.jacobian * out.jacobian;
    out.value = jet.value;
  }
  return out;
}

double smallest_singular_value(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues().minCoeff();
}

// Norm of the second derivative of f^q at x, by central differences of the
// Jacobian along each coordinate.
double second_derivative_norm(const ChartMap& f, const CVec& x, int q) {
  const int k = f.k();
  const double h = 1e-5 * scale_of(x);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    CVec e = CVec::Zero(k);
    e[i] = h;
    const CMat diff = (power_jet(f, x + e, q).jacobian - power_jet(f, x - e, q).jacobian) / (2.0 * h);
    sum += diff.squaredNorm();
  }
  return std::sqrt(sum);
}

int minimal_period(const ChartMap& f, const CVec& x, int max_period) {
  CVec y = x;
  for (int p = 1; p <= max_period; ++p) {
    y = f(y);
    if ((y - x).norm() <= 1e-9 * scale_of(x)) return p;
  }
  return 0;
}

}  // namespace

std::vector<CVec> periodic_closure(const FamilySpec& spec, cplx lambda, const std::vector<CVec>& seeds,
                                   std::vector<int>* periods) {
  const ChartMap f(spec, lambda);
  std::vector<CVec> out;
  std::vector<int> per;
  for (const auto& s : seeds) {
    if (s.size() != spec.k()) throw Error(ErrorKind::InvalidArgument, "seed point has the wrong dimension");
    const int p = minimal_period(f, s, 64);
    if (p == 0) throw Error(ErrorKind::InvalidArgument, "seed point is not periodic (period ≤ 64)");
    CVec y = s;
    for (int j = 0; j < p; ++j) {
      const bool seen = std::any_of(out.begin(), out.end(),
                                    [&](const CVec& z) { return (z - y).norm() <= 1e-9 * scale_of(y); });
      if (!seen) {
        out.push_back(y);
        per.push_back(p);
      }
      y = f(y);
    }
  }
  if (periods) *periods = per;
  return out;
}

MotionRecord motion_hyperbolic(const FamilySpec& spec, cplx base, const std::vector<CVec>& seeds,
                               const MotionOptions& opt) {
  if (seeds.empty()) throw Error(ErrorKind::InvalidArgument, "empty hyperbolic set");
  if (!(opt.rho > 0.0) || opt.n_steps < 1 || !(opt.tau > 0.0))
    throw Error(ErrorKind::InvalidArgument, "motion needs rho > 0, tau > 0 and n_steps ≥ 1");
  const int k = spec.k();
  MotionRecord rec;
  rec.base = base;
  rec.rho = opt.rho;
  rec.tau = opt.tau;
  rec.points = periodic_closure(spec, base, seeds, &rec.periods);
  const std::size_t m = rec.points.size();

  rec.lambdas.push_back(base);
  for (int r = 1; r <= opt.radial; ++r)
    for (int a = 0; a < opt.angular; ++a)
      rec.lambdas.push_back(base + opt.rho * (static_cast<double>(r) / opt.radial) *
                                       std::polar(1.0, 2.0 * kPi * a / opt.angular));
  std::vector<ChartMap> maps;
  for (cplx lam : rec.lambdas) maps.emplace_back(spec, lam);

  auto expansion_for = [&](int q) {
    double e = std::numeric_limits<double>::infinity();
    for (const auto& f : maps)
      for (const auto& z : rec.points) e = std::min(e, smallest_singular_value(power_jet(f, z, q).jacobian));
    return e;
  };
  int q = 1;
  double kp = expansion_for(1);
  if (kp <= 3.0) {
    const int l = std::accumulate(rec.periods.begin(), rec.periods.end(), 1,
                                  [](int a, int b) { return std::lcm(a, b); });
    if (l > 1) {
      q = l;
      kp = expansion_for(q);
    }
  }
  rec.power = q;
  rec.expansion = kp;
  if (!(kp > 3.0))
    throw Error(ErrorKind::ExpansionHypothesisFailed,
                "smallest singular value " + std::to_string(kp) + " on the hyperbolic set does not exceed 3");

  // sampled constants on the τ-tubes and on E_0
  double c2 = 0.0, q_bound = 0.0, tube = std::numeric_limits<double>::infinity();
  for (const auto& f : maps) {
    for (const auto& z : rec.points) {
      q_bound = std::max(q_bound, power_jet(f, z, q).dlambda.norm());
      c2 = std::max(c2, second_derivative_norm(f, z, q));
      for (int s = 0; s < opt.tube_samples; ++s) {
        const double radius = (s % 2 == 0 ? 1.0 : 0.5) * opt.tau;
        const cplx dir = std::polar(1.0, 2.0 * kPi * s / opt.tube_samples);
        CVec y = z;
        if (k == 1) {
          y[0] += radius * dir;
        } else {
          y[s % 4 < 2 ? 0 : 1] += radius * dir;
        }
        c2 = std::max(c2, second_derivative_norm(f, y, q));
        tube = std::min(tube, smallest_singular_value(power_jet(f, y, q).jacobian));
      }
    }
  }
  rec.second_derivative = c2;
  rec.parameter_derivative = q_bound;
  rec.tube_expansion = tube;
  rec.delta = std::min(1.0 / (1.0 + 2.0 * c2), opt.tau);
  if (rec.delta < 2.0 * q_bound * opt.rho)
    throw Error(ErrorKind::ContractionViolated, "delta " + std::to_string(rec.delta) + " < 2·Q·rho = " +
                                                    std::to_string(2.0 * q_bound * opt.rho) + "; halve rho");

  // h_n(λ, z) = g^n_{λ,z}(f_0^n(z)); for points fixed by f_0^q the base orbit
  // is constant and each pass applies the inverse branch at z once more.
  const ChartMap f0(spec, base);
  const double ratio_bound = 1.0 / (kp - 1.0);
  rec.step_size.assign(static_cast<std::size_t>(opt.n_steps), 0.0);
  rec.images.assign(rec.lambdas.size(), std::vector<CVec>(m));
  for (std::size_t l = 0; l < rec.lambdas.size(); ++l) {
    const auto& f = maps[l];
    for (std::size_t i = 0; i < m; ++i) {
      const CVec& z = rec.points[i];
      if ((iterate(f0, z, q) - z).norm() > 1e-9 * scale_of(z))
        throw Error(ErrorKind::InvalidArgument, "hyperbolic set point is not fixed by the chosen power");
      CVec h = z;  // h_0
      double prev_diff = -1.0;
      for (int n = 0; n < opt.n_steps; ++n) {
        // inverse branch of f_λ^q near z applied to h_n, by Newton from z
        CVec y = z;
        for (int it = 0; it < 60; ++it) {
          const auto j = power_jet(f, y, q);
          const CVec step = j.jacobian.fullPivLu().solve(j.value - h);
          y -= step;
          if (step.norm() <= 1e-16 * scale_of(y)) break;
        }
        if (!y.allFinite() || (power_jet(f, y, q).value - h).norm() > 1e-12 * scale_of(h))
          throw Error(ErrorKind::ContractionViolated, "inverse branch did not converge");
        if ((y - z).norm() > rec.delta / 2.0)
          throw Error(ErrorKind::ContractionViolated, "inverse branch left the delta/2 ball");
        const double diff = (y - h).norm();
        if (diff > (rec.delta / 2.0) * std::pow(ratio_bound, n) + 1e-14 * scale_of(z))
          throw Error(ErrorKind::ContractionViolated, "Cauchy bound failed at step " + std::to_string(n));
        if (prev_diff > 1e-12 && diff > 1e-12) rec.max_cauchy_ratio = std::max(rec.max_cauchy_ratio, diff / prev_diff);
        rec.step_size[static_cast<std::size_t>(n)] = std::max(rec.step_size[static_cast<std::size_t>(n)], diff);
        prev_diff = diff;
        h = y;
      }
      rec.images[l][i] = h;
    }
  }

  // a posteriori checks
  rec.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < rec.lambdas.size(); ++l) {
    const auto& f = maps[l];
    const auto& img = rec.images[l];
    for (std::size_t i = 0; i < m; ++i) {
      const CVec fz0 = f0(rec.points[i]);
      std::size_t target = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < m; ++t) {
        const double dist = (rec.points[t] - fz0).norm();
        if (dist < best) {
          best = dist;
          target = t;
        }
      }
      rec.max_conjugacy_residual = std::max(rec.max_conjugacy_residual, (img[target] - f(img[i])).norm());
      for (std::size_t t = i + 1; t < m; ++t) rec.min_separation = std::min(rec.min_separation, (img[i] - img[t]).norm());
      const Cycle c = make_cycle(spec, rec.lambdas[l], img[i], rec.periods[i]);
      if (c.classification != CycleClass::repelling || minimal_period(f, img[i], rec.periods[i]) != rec.periods[i])
        rec.preserves_cycles = false;
    }
  }
  if (m < 2) rec.min_separation = std::numeric_limits<double>::infinity();
  return rec;
}

}  // namespace biflab

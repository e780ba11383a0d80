#include "biflab/green.hpp"

#include <cmath>

#include "biflab/errors.hpp"
#include "biflab/rng.hpp"

namespace biflab {

namespace {

constexpr double kDegenerateNorm = 1e-250;

}  // namespace

GreenEvaluator::GreenEvaluator(const FamilySpec& spec, double tol, const LambdaWindow& window, std::uint64_t seed,
                               int sup_samples)
    : spec_(spec), tol_(tol), sup_bound_(0.0), n_steps_(0) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "Green tolerance must be positive");
  Rng rng(seed);
  const int n = spec.k() + 1;
  const bool fixed = spec.lambda_independent() || (window.half_width == 0.0 && window.half_height == 0.0);
  std::optional<Lift> fixed_lift;
  if (fixed) fixed_lift.emplace(spec, window.center);
  double sup = 0.0;
  for (int s = 0; s < sup_samples; ++s) {
    const HVec z = random_unit_vector(rng, n);
    double v;
    if (fixed) {
      v = (*fixed_lift)(z).norm();
    } else {
      const cplx lambda = window.center + cplx(uniform(rng, -window.half_width, window.half_width),
                                               uniform(rng, -window.half_height, window.half_height));
      v = Lift(spec, lambda)(z).norm();
    }
    sup = std::max(sup, std::abs(std::log(v)));
  }
  sup_bound_ = 2.0 * sup;
  const double d = spec.d();
  while (sup_bound_ * std::pow(d, -n_steps_) / (d - 1.0) > tol_) ++n_steps_;
}

double GreenEvaluator::tail_bound() const {
  const double d = spec_.d();
  return sup_bound_ * std::pow(d, -n_steps_) / (d - 1.0);
}

GreenValue GreenEvaluator::value(const Lift& lift, const HVec& z) const {
  const double norm = z.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "Green function at the origin");
  HVec u = z / norm;
  double g = std::log(norm);
  const double inv_d = 1.0 / lift.d();
  double w = inv_d;
  for (int j = 0; j < n_steps_; ++j) {
    const HVec v = lift(u);
    const double vn = v.norm();
    if (vn < kDegenerateNorm) throw Error(ErrorKind::DegenerateAtPoint, "lift nearly vanishes along the orbit");
    g += w * std::log(vn);
    u = v / vn;
    w *= inv_d;
  }
  return GreenValue{g, tail_bound(), n_steps_};
}

GreenValue GreenEvaluator::value(cplx lambda, const HVec& z) const { return value(Lift(spec_, lambda), z); }

std::vector<double> GreenEvaluator::partial_sums(cplx lambda, const HVec& z) const {
  const Lift lift(spec_, lambda);
  const double norm = z.norm();
  HVec u = z / norm;
  std::vector<double> out{std::log(norm)};
  double w = 1.0 / lift.d();
  for (int j = 0; j < n_steps_; ++j) {
    const HVec v = lift(u);
    const double vn = v.norm();
    if (vn < kDegenerateNorm) throw Error(ErrorKind::DegenerateAtPoint, "lift nearly vanishes along the orbit");
    out.push_back(out.back() + w * std::log(vn));
    u = v / vn;
    w /= lift.d();
  }
  return out;
}

double GreenEvaluator::affine(cplx lambda, const CVec& z) const {
  const HVec zt = lift_point(z);
  return value(lambda, zt).value - std::log(zt.norm());
}

double GreenEvaluator::escape_rate(cplx lambda, cplx z) const {
  if (spec_.kind() != FamilyKind::polynomial)
    throw Error(ErrorKind::UnsupportedFamily, "escape rate needs a polynomial family");
  const double a = std::abs(spec_.infinity_coefficient(lambda));
  return value(lambda, lift_point(cvec(z))).value - std::log(a) / (spec_.d() - 1);
}

double GreenEvaluator::functional_equation_residual(cplx lambda, const HVec& z) const {
  const Lift lift(spec_, lambda);
  const double g0 = value(lift, z).value;
  const double g1 = value(lift, lift(z)).value;
  return std::abs(g1 - spec_.d() * g0);
}

}  // namespace biflab

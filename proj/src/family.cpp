#include "biflab/family.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "biflab/errors.hpp"
#include "biflab/rng.hpp"

namespace biflab {

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::generic: return "generic";
    case FamilyKind::polynomial: return "polynomial";
    case FamilyKind::skew: return "skew";
  }
  return "generic";
}

FamilyKind family_kind_from_string(std::string_view s) {
  if (s == "generic") return FamilyKind::generic;
  if (s == "polynomial") return FamilyKind::polynomial;
  if (s == "skew") return FamilyKind::skew;
  throw Error(ErrorKind::MalformedFamily, "unknown family kind '" + std::string(s) + "'");
}

namespace {

bool only_monomial(const std::vector<Monomial>& form, const std::array<int, 3>& e, int n) {
  if (form.size() != 1) return false;
  for (int i = 0; i < n; ++i)
    if (form[0].exponents[static_cast<std::size_t>(i)] != e[static_cast<std::size_t>(i)]) return false;
  return !form[0].coefficient.is_zero();
}

bool has_monomial(const std::vector<Monomial>& form, const std::array<int, 3>& e, int n) {
  return std::any_of(form.begin(), form.end(), [&](const Monomial& m) {
    for (int i = 0; i < n; ++i)
      if (m.exponents[static_cast<std::size_t>(i)] != e[static_cast<std::size_t>(i)]) return false;
    return !m.coefficient.is_zero();
  });
}

}  // namespace

FamilySpec::FamilySpec(int k, int d, FamilyKind kind, std::vector<std::vector<Monomial>> coords,
                       std::string label)
    : k_(k), d_(d), kind_(kind), coords_(std::move(coords)), label_(std::move(label)) {
  if (k_ != 1 && k_ != 2) throw Error(ErrorKind::MalformedFamily, "k must be 1 or 2");
  if (d_ < 2) throw Error(ErrorKind::MalformedFamily, "degree must be at least 2");
  if (d_ > 16) throw Error(ErrorKind::MalformedFamily, "degree above 16 is not supported");
  if (static_cast<int>(coords_.size()) != k_ + 1)
    throw Error(ErrorKind::MalformedFamily, "expected k+1 coordinate forms");
  const int n = k_ + 1;
  for (std::size_t c = 0; c < coords_.size(); ++c) {
    std::set<std::array<int, 3>> seen;
    for (const auto& m : coords_[c]) {
      int sum = 0;
      for (int i = 0; i < 3; ++i) {
        int e = m.exponents[static_cast<std::size_t>(i)];
        if (e < 0) throw Error(ErrorKind::MalformedFamily, "negative exponent");
        if (i >= n && e != 0) throw Error(ErrorKind::MalformedFamily, "exponent beyond k+1 variables");
        sum += e;
      }
      if (sum != d_)
        throw Error(ErrorKind::MalformedFamily,
                    "monomial in coord " + std::to_string(c) + " has total degree " + std::to_string(sum));
      if (!seen.insert(m.exponents).second)
        throw Error(ErrorKind::MalformedFamily, "repeated monomial in coord " + std::to_string(c));
    }
  }
  if (kind_ == FamilyKind::polynomial) {
    if (k_ != 1) throw Error(ErrorKind::MalformedFamily, "polynomial kind requires k = 1");
    if (!only_monomial(coords_[1], {0, d_, 0}, 2))
      throw Error(ErrorKind::MalformedFamily, "polynomial kind requires last form a(λ)·t^d");
    if (!has_monomial(coords_[0], {d_, 0, 0}, 2))
      throw Error(ErrorKind::MalformedFamily, "polynomial kind requires an x^d term");
  }
  if (kind_ == FamilyKind::skew) {
    if (k_ != 2) throw Error(ErrorKind::MalformedFamily, "skew kind requires k = 2");
    if (!only_monomial(coords_[2], {0, 0, d_}, 3))
      throw Error(ErrorKind::MalformedFamily, "skew kind requires last form a(λ)·t^d");
    for (const auto& m : coords_[0])
      if (m.exponents[1] != 0) throw Error(ErrorKind::MalformedFamily, "skew base form may not involve y");
    if (!has_monomial(coords_[0], {d_, 0, 0}, 3))
      throw Error(ErrorKind::MalformedFamily, "skew kind requires an x^d term in the base");
    if (!has_monomial(coords_[1], {0, d_, 0}, 3))
      throw Error(ErrorKind::MalformedFamily, "skew kind requires a y^d term in the fiber");
  }
}

bool FamilySpec::lambda_independent() const {
  for (const auto& form : coords_)
    for (const auto& m : form)
      if (m.coefficient.degree() > 0) return false;
  return true;
}

cplx FamilySpec::infinity_coefficient(cplx lambda) const {
  if (kind_ == FamilyKind::generic)
    throw Error(ErrorKind::UnsupportedFamily, "infinity coefficient needs a polynomial or skew family");
  return coords_.back().front().coefficient(lambda);
}

// ---------------------------------------------------------------------------

Lift::Lift(const FamilySpec& spec, cplx lambda) : k_(spec.k()), d_(spec.d()), lambda_(lambda) {
  for (int c = 0; c <= k_; ++c) {
    for (const auto& m : spec.coord(c)) {
      terms_[static_cast<std::size_t>(c)].push_back(
          Term{m.exponents, m.coefficient(lambda), m.coefficient.derivative(lambda)});
    }
  }
}

namespace {

// Powers z_i^0 .. z_i^d for each coordinate.
struct PowerTable {
  std::array<std::array<cplx, 17>, 3> p;

  PowerTable(const HVec& z, int d) {
    for (int i = 0; i < z.size(); ++i) {
      auto& row = p[static_cast<std::size_t>(i)];
      row[0] = 1.0;
      for (int e = 1; e <= d; ++e) row[static_cast<std::size_t>(e)] = row[static_cast<std::size_t>(e - 1)] * z[i];
    }
  }
  cplx operator()(int i, int e) const { return p[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)]; }
};

}  // namespace

HVec Lift::operator()(const HVec& z) const {
  const int n = k_ + 1;
  PowerTable pw(z, d_);
  HVec out(n);
  for (int c = 0; c < n; ++c) {
    cplx acc = 0.0;
    for (const auto& t : terms_[static_cast<std::size_t>(c)]) {
      cplx m = t.c;
      for (int i = 0; i < n; ++i) m *= pw(i, t.e[static_cast<std::size_t>(i)]);
      acc += m;
    }
    out[c] = acc;
  }
  return out;
}

Lift::Jet Lift::jet(const HVec& z) const {
  const int n = k_ + 1;
  PowerTable pw(z, d_);
  Jet j{HVec::Zero(n), HMat::Zero(n, n), HVec::Zero(n)};
  for (int c = 0; c < n; ++c) {
    for (const auto& t : terms_[static_cast<std::size_t>(c)]) {
      cplx mono = 1.0;
      for (int i = 0; i < n; ++i) mono *= pw(i, t.e[static_cast<std::size_t>(i)]);
      j.value[c] += t.c * mono;
      j.dlambda[c] += t.dc * mono;
      for (int v = 0; v < n; ++v) {
        const int ev = t.e[static_cast<std::size_t>(v)];
        if (ev == 0) continue;
        cplx partial = t.c * static_cast<double>(ev);
        for (int i = 0; i < n; ++i) partial *= pw(i, t.e[static_cast<std::size_t>(i)] - (i == v ? 1 : 0));
        j.jacobian(c, v) += partial;
      }
    }
  }
  return j;
}

HMat Lift::jacobian(const HVec& z) const { return jet(z).jacobian; }

cplx Lift::jacobian_det(const HVec& z) const { return jacobian(z).determinant(); }

HVec Lift::dlambda(const HVec& z) const { return jet(z).dlambda; }

// ---------------------------------------------------------------------------

ProjPoint::ProjPoint(const HVec& coords) : v_(coords) {
  const double n = v_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::InvalidArgument, "projective point needs a nonzero finite vector");
  v_ /= n;
  double best = 0.0;
  for (int i = 0; i < v_.size(); ++i) best = std::max(best, std::abs(v_[i]));
  for (int i = 0; i < v_.size(); ++i) {
    if (std::abs(v_[i]) >= best * (1.0 - 1e-12)) {
      const cplx phase = std::conj(v_[i]) / std::abs(v_[i]);
      v_ *= phase;
      v_[i] = std::abs(v_[i]);
      break;
    }
  }
}

double ProjPoint::distance(const ProjPoint& other) const {
  // sin of the angle between the two complex lines, via the orthogonal
  // component (accurate for nearby points)
  return (other.v_ - v_ * v_.dot(other.v_)).norm();
}

HVec lift_point(const CVec& z, int chart) {
  const int k = static_cast<int>(z.size());
  if (chart < 0) chart = k;
  HVec out(k + 1);
  for (int i = 0, j = 0; i <= k; ++i) out[i] = (i == chart) ? cplx(1.0) : z[j++];
  return out;
}

CVec dehomogenize(const HVec& z, int chart) {
  const int k = static_cast<int>(z.size()) - 1;
  if (chart < 0) chart = k;
  const cplx den = z[chart];
  if (std::abs(den) < 1e-300) throw Error(ErrorKind::ChartOverflow, "point lies on the chart's hyperplane at infinity");
  CVec out(k);
  for (int i = 0, j = 0; i <= k; ++i)
    if (i != chart) out[j++] = z[i] / den;
  return out;
}

ChartMap::ChartMap(const FamilySpec& spec, cplx lambda, int chart)
    : lift_(spec, lambda), chart_(chart < 0 ? spec.k() : chart) {}

CVec ChartMap::operator()(const CVec& z) const { return dehomogenize(lift_(lift_point(z, chart_)), chart_); }

ChartMap::Jet ChartMap::jet(const CVec& z) const {
  const int k = lift_.k();
  const auto lj = lift_.jet(lift_point(z, chart_));
  const cplx den = lj.value[chart_];
  if (std::abs(den) < 1e-300) throw Error(ErrorKind::ChartOverflow, "image lies on the chart's hyperplane at infinity");
  const cplx inv = 1.0 / den;
  const cplx inv2 = inv * inv;
  std::array<int, 2> idx{};
  for (int i = 0, j = 0; i <= k; ++i)
    if (i != chart_) idx[static_cast<std::size_t>(j++)] = i;
  Jet out{CVec(k), CMat(k, k), CVec(k)};
  for (int a = 0; a < k; ++a) {
    const int ra = idx[static_cast<std::size_t>(a)];
    out.value[a] = lj.value[ra] * inv;
    out.dlambda[a] = (lj.dlambda[ra] * den - lj.value[ra] * lj.dlambda[chart_]) * inv2;
    for (int b = 0; b < k; ++b) {
      const int cb = idx[static_cast<std::size_t>(b)];
      out.jacobian(a, b) = (lj.jacobian(ra, cb) * den - lj.value[ra] * lj.jacobian(chart_, cb)) * inv2;
    }
  }
  return out;
}

HVec evaluate_lift(const FamilySpec& spec, cplx lambda, const HVec& z) { return Lift(spec, lambda)(z); }

cplx jacobian_lift(const FamilySpec& spec, cplx lambda, const HVec& z) { return Lift(spec, lambda).jacobian_det(z); }

CVec affine_map(const FamilySpec& spec, cplx lambda, const CVec& z, int chart) {
  return ChartMap(spec, lambda, chart)(z);
}

AffineJacobian affine_jacobian(const FamilySpec& spec, cplx lambda, const CVec& z, int chart) {
  auto j = ChartMap(spec, lambda, chart).jet(z);
  return {j.jacobian, j.jacobian.determinant()};
}

double log_fs_jacobian(const Lift& lift, const HVec& z) {
  const HVec u = z / z.norm();
  const auto j = lift.jet(u);
  const double k1 = static_cast<double>(lift.k() + 1);
  return std::log(std::abs(j.jacobian.determinant())) - std::log(static_cast<double>(lift.d())) -
         k1 * std::log(j.value.norm());
}

NondegeneracyReport check_nondegenerate(const FamilySpec& spec, cplx lambda, int starts, std::uint64_t seed) {
  const Lift lift(spec, lambda);
  const int n = spec.k() + 1;
  Rng rng(seed);
  NondegeneracyReport report;
  report.min_residual = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    HVec z = random_unit_vector(rng, n);
    double res = lift(z).norm();
    double mu = 1e-3;
    for (int it = 0; it < 200 && res > 1e-14; ++it) {
      const auto j = lift.jet(z);
      const HMat a = j.jacobian.adjoint() * j.jacobian + mu * HMat::Identity(n, n);
      HVec step = a.lu().solve(-(j.jacobian.adjoint() * j.value));
      step -= z * z.dot(step);  // stay tangent to the sphere
      HVec trial = z + step;
      trial /= trial.norm();
      const double trial_res = lift(trial).norm();
      if (trial_res < res) {
        z = trial;
        res = trial_res;
        mu = std::max(mu / 3.0, 1e-15);
      } else {
        mu *= 4.0;
        if (mu > 1e12) break;
      }
    }
    if (res < report.min_residual) report.min_residual = res;
    if (res < 1e-10) {
      report.nondegenerate = false;
      report.witness = ProjPoint(z);
      return report;
    }
  }
  return report;
}

UnivariateChart univariate_chart(const FamilySpec& spec, cplx lambda, int chart) {
  if (spec.k() != 1) throw Error(ErrorKind::UnsupportedFamily, "univariate chart needs k = 1");
  const int d = spec.d();
  UnivariateChart out;
  out.num.assign(static_cast<std::size_t>(d + 1), 0.0);
  out.den = out.dnum = out.dden = out.num;
  // chart 1: variable x/t, power = e0; chart 0: variable t/x, power = e1.
  const int var = (chart == 1) ? 0 : 1;
  const int num_form = (chart == 1) ? 0 : 1;
  for (int form = 0; form < 2; ++form) {
    auto& val = (form == num_form) ? out.num : out.den;
    auto& der = (form == num_form) ? out.dnum : out.dden;
    for (const auto& m : spec.coord(form)) {
      const auto p = static_cast<std::size_t>(m.exponents[static_cast<std::size_t>(var)]);
      val[p] += m.coefficient(lambda);
      der[p] += m.coefficient.derivative(lambda);
    }
  }
  return out;
}

}  // namespace biflab

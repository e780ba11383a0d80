#include "biflab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "biflab/errors.hpp"

namespace biflab {

cplx poly_eval(std::span<const cplx> p, cplx z) {
  if (p.empty()) return 0.0;
  cplx acc = p.back();
  for (std::size_t i = p.size() - 1; i-- > 0;) acc = acc * z + p[i];
  return acc;
}

Poly poly_derivative(std::span<const cplx> p) {
  if (p.size() < 2) return {};
  Poly out(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = p[i] * static_cast<double>(i);
  return out;
}

Poly poly_mul(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly poly_add(std::span<const cplx> a, std::span<const cplx> b) {
  Poly out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Poly poly_sub(std::span<const cplx> a, std::span<const cplx> b) {
  Poly out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

Poly poly_scale(std::span<const cplx> a, cplx s) {
  Poly out(a.begin(), a.end());
  for (auto& c : out) c *= s;
  return out;
}

int poly_degree(std::span<const cplx> p) {
  int n = static_cast<int>(p.size()) - 1;
  while (n >= 0 && p[static_cast<std::size_t>(n)] == cplx(0.0)) --n;
  return n;
}

Poly poly_divide(std::span<const cplx> num, std::span<const cplx> den) {
  const int dn = poly_degree(num);
  const int dd = poly_degree(den);
  if (dd < 0) throw Error(ErrorKind::InvalidArgument, "division by the zero polynomial");
  if (dn < dd) return {};
  Poly rem(num.begin(), num.begin() + dn + 1);
  Poly q(static_cast<std::size_t>(dn - dd + 1), 0.0);
  const cplx lead = den[static_cast<std::size_t>(dd)];
  for (int i = dn - dd; i >= 0; --i) {
    const cplx c = rem[static_cast<std::size_t>(i + dd)] / lead;
    q[static_cast<std::size_t>(i)] = c;
    for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(i + j)] -= c * den[static_cast<std::size_t>(j)];
  }
  return q;
}

namespace {

// Relative backward error |p(z)| / Σ|c_i||z|^i.
double relative_residual(std::span<const cplx> p, cplx z) {
  cplx acc = p.back();
  double scale = std::abs(p.back());
  const double az = std::abs(z);
  for (std::size_t i = p.size() - 1; i-- > 0;) {
    acc = acc * z + p[i];
    scale = scale * az + std::abs(p[i]);
  }
  return scale > 0.0 ? std::abs(acc) / scale : 0.0;
}

void value_and_derivative(std::span<const cplx> p, cplx z, cplx& v, cplx& dv) {
  v = p.back();
  dv = 0.0;
  for (std::size_t i = p.size() - 1; i-- > 0;) {
    dv = dv * z + v;
    v = v * z + p[i];
  }
}

std::vector<cplx> aberth(std::span<const cplx> p, int max_iterations) {
  const int n = static_cast<int>(p.size()) - 1;
  std::vector<cplx> z(static_cast<std::size_t>(n));
  const double r = std::pow(std::abs(p[0]) / std::abs(p.back()), 1.0 / n);
  for (int j = 0; j < n; ++j)
    z[static_cast<std::size_t>(j)] = std::polar(r, 2.0 * kPi * j / n + 0.4);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (int it = 0; it < max_iterations; ++it) {
    bool all_done = true;
    for (int i = 0; i < n; ++i) {
      auto ui = static_cast<std::size_t>(i);
      if (done[ui]) continue;
      cplx v, dv;
      value_and_derivative(p, z[ui], v, dv);
      if (v == cplx(0.0)) {
        done[ui] = true;
        continue;
      }
      const cplx ratio = v / dv;
      cplx sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[ui] - z[static_cast<std::size_t>(j)]);
      cplx w = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = ratio;
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = cplx(1e-3, 1e-3);
      z[ui] -= w;
      if (std::abs(w) <= 4.0 * 2.220446049250313e-16 * std::abs(z[ui])) done[ui] = true;
      else all_done = false;
    }
    if (all_done) break;
  }
  return z;
}

}  // namespace

std::vector<Root> polynomial_roots(std::span<const cplx> coeffs, const RootOptions& opt) {
  const int deg = poly_degree(coeffs);
  if (deg < 0) throw Error(ErrorKind::InvalidArgument, "roots of the zero polynomial");
  std::span<const cplx> p = coeffs.first(static_cast<std::size_t>(deg + 1));
  std::vector<cplx> raw;
  // exact zero roots
  std::size_t zeros = 0;
  while (zeros < p.size() - 1 && p[zeros] == cplx(0.0)) ++zeros;
  raw.assign(zeros, 0.0);
  std::span<const cplx> q = p.subspan(zeros);
  const int n = static_cast<int>(q.size()) - 1;
  if (n == 1) {
    raw.push_back(-q[0] / q[1]);
  } else if (n == 2) {
    const cplx a = q[2], b = q[1], c = q[0];
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    const cplx s = (std::real(std::conj(b) * disc) >= 0.0) ? -(b + disc) / 2.0 : -(b - disc) / 2.0;
    if (s == cplx(0.0)) {
      raw.push_back(0.0);
      raw.push_back(0.0);
    } else {
      raw.push_back(s / a);
      raw.push_back(c / s);
    }
  } else if (n > 2) {
    auto z = aberth(q, opt.max_iterations);
    raw.insert(raw.end(), z.begin(), z.end());
  }
  // Newton polish on the full polynomial
  for (auto& z : raw) {
    double res = relative_residual(p, z);
    for (int it = 0; it < 4 && res > 0.0; ++it) {
      cplx v, dv;
      value_and_derivative(p, z, v, dv);
      if (dv == cplx(0.0)) break;
      const cplx trial = z - v / dv;
      const double tr = relative_residual(p, trial);
      if (!(tr < res)) break;
      z = trial;
      res = tr;
    }
  }
  // cluster merge
  const std::size_t m = raw.size();
  std::vector<int> group(m, -1);
  std::vector<Root> out;
  for (std::size_t i = 0; i < m; ++i) {
    if (group[i] >= 0) continue;
    group[i] = static_cast<int>(out.size());
    std::vector<std::size_t> members{i};
    for (std::size_t probe = 0; probe < members.size(); ++probe) {
      const cplx zi = raw[members[probe]];
      for (std::size_t j = i + 1; j < m; ++j) {
        if (group[j] >= 0) continue;
        if (std::abs(raw[j] - zi) < opt.cluster_radius * std::max(1.0, std::abs(zi))) {
          group[j] = group[i];
          members.push_back(j);
        }
      }
    }
    cplx mean = 0.0;
    for (auto idx : members) mean += raw[idx];
    mean /= static_cast<double>(members.size());
    out.push_back(Root{mean, static_cast<int>(members.size())});
  }
  for (const auto& r : out) {
    const double res = relative_residual(p, r.value);
    if (!(res <= opt.residual_tol))
      throw Error(ErrorKind::RootFindingFailure, "polished residual " + std::to_string(res) + " above tolerance");
  }
  return out;
}

std::vector<cplx> expand_roots(const std::vector<Root>& roots) {
  std::vector<cplx> out;
  for (const auto& r : roots) out.insert(out.end(), static_cast<std::size_t>(r.multiplicity), r.value);
  return out;
}

std::vector<ProjRoot> binary_form_roots(std::span<const cplx> a, const RootOptions& opt) {
  const int n = static_cast<int>(a.size()) - 1;
  const int deg = poly_degree(a);
  if (deg < 0) throw Error(ErrorKind::InvalidArgument, "zero binary form");
  Poly rev(a.rbegin(), a.rend());  // coefficients in s = t/x
  std::vector<ProjRoot> out;
  auto push = [&](cplx x, cplx t, int mult) {
    HVec v(2);
    v << x, t;
    out.push_back(ProjRoot{v / v.norm(), mult});
  };
  if (deg > 0) {
    for (const auto& r : polynomial_roots(a.first(static_cast<std::size_t>(deg + 1)), opt)) {
      if (std::abs(r.value) <= 1.0) {
        push(r.value, 1.0, r.multiplicity);
        continue;
      }
      cplx s = 1.0 / r.value;
      if (r.multiplicity == 1) {
        for (int it = 0; it < 4; ++it) {
          cplx v, dv;
          value_and_derivative(rev, s, v, dv);
          if (dv == cplx(0.0)) break;
          const cplx step = v / dv;
          if (!(std::abs(step) < 0.1 * std::abs(s) + 1e-300)) break;
          s -= step;
        }
      }
      push(1.0, s, r.multiplicity);
    }
  }
  if (n > deg) push(1.0, 0.0, n - deg);
  return out;
}

}  // namespace biflab

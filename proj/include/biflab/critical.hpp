#pragma once

#include <cstdint>
#include <vector>

#include "biflab/family.hpp"
#include "biflab/roots.hpp"

namespace biflab {

/// Critical point of a k = 1 map on P^1.
///
/// `point` is a chart representative: (c, 1) when |c| <= 1 and (1, s)
/// otherwise, so ∞ is (1, 0). `velocity` is the λ-derivative of that
/// representative along the holomorphic continuation of the point (zero for
/// multiple roots, where the continuation is not a function of λ).
struct CriticalPoint {
  HVec point;
  HVec velocity;
  int multiplicity = 1;

  bool finite() const { return std::abs(point[1]) > 0.0; }
  cplx chart_value() const { return point[0] / point[1]; }
};

/// Binary form J_F(x, t) = det DF of degree 2d − 2, ascending in x, with its
/// λ-derivative.
struct CriticalForm {
  Poly value;
  Poly dlambda;
};
CriticalForm critical_form(const FamilySpec& spec, cplx lambda);

/// All 2d − 2 critical points on P^1 with multiplicity (k = 1 only).
std::vector<CriticalPoint> critical_points_projective(const FamilySpec& spec, cplx lambda,
                                                      const RootOptions& opt = {});

/// Critical points in the affine chart t = 1 (points at ∞ omitted).
std::vector<Root> critical_points(const FamilySpec& spec, cplx lambda, const RootOptions& opt = {});

/// Area-weighted sample of the critical curve of a k = 2 skew product in the
/// chart t = 1. The critical set there is {p'(z) = 0} ∪ {∂_w q(z, w) = 0};
/// weights are Fubini–Study area density divided by the sampling density, so
/// Σ weight·φ / n estimates ∫ φ over the curve.
struct CriticalSample {
  CVec point;
  double weight = 1.0;
  int component = 0;  // 0: vertical line over a base critical point, 1: fiber-critical curve
};
std::vector<CriticalSample> critical_curve_samples(const FamilySpec& spec, cplx lambda, int n,
                                                   std::uint64_t seed = 1);

}  // namespace biflab

#pragma once

#include <cstdint>

#include "biflab/family.hpp"

namespace biflab {

/// Rectangle of parameters [center ± half_width] × [center ± i·half_height].
struct LambdaWindow {
  cplx center{0.0, 0.0};
  double half_width = 0.0;
  double half_height = 0.0;
};

struct GreenValue {
  double value = 0.0;
  double error_bound = 0.0;
  int n_steps = 0;
};

/// Renormalized escape-rate evaluator for G(λ, z̃) = lim d^{-n} log‖F^n(z̃)‖.
///
/// sup_bound is twice the largest |log‖F_λ(ẑ)‖| seen over 10,000 random
/// (λ in window, unit ẑ); the truncation depth is the smallest n with
/// sup_bound·d^{-n}/(d−1) ≤ tol. Values at λ outside the window are computed
/// with the same depth and are not covered by the bound.
class GreenEvaluator {
 public:
  GreenEvaluator(const FamilySpec& spec, double tol, const LambdaWindow& window = {},
                 std::uint64_t seed = 7, int sup_samples = 10000);

  const FamilySpec& family() const { return spec_; }
  double tol() const { return tol_; }
  double sup_bound() const { return sup_bound_; }
  int n_steps() const { return n_steps_; }
  double tail_bound() const;

  GreenValue value(cplx lambda, const HVec& z) const;
  GreenValue value(const Lift& lift, const HVec& z) const;
  /// Partial sums G_0..G_n (index j holds G_j), for tail diagnostics.
  std::vector<double> partial_sums(cplx lambda, const HVec& z) const;

  /// g(λ, z) = G(λ, (z, 1)) − log‖(z, 1)‖ in the standard chart.
  double affine(cplx lambda, const CVec& z) const;

  /// Classical escape rate lim d^{-n} log⁺|f^n(z)| of a polynomial family:
  /// G(λ, (z, 1)) − log|a(λ)|/(d − 1), where a(λ)·t^d is the last form.
  double escape_rate(cplx lambda, cplx z) const;

  /// |G(λ, F_λ(z̃)) − d·G(λ, z̃)|.
  double functional_equation_residual(cplx lambda, const HVec& z) const;

 private:
  FamilySpec spec_;
  double tol_;
  double sup_bound_;
  int n_steps_;
};

}  // namespace biflab

#pragma once

#include <span>
#include <vector>

#include "biflab/types.hpp"

namespace biflab {

/// Polynomial c_0 + c_1 λ + ... + c_r λ^r in one complex parameter.
/// Trailing zero coefficients are dropped on construction, so degree() is the
/// index of the last stored nonzero coefficient (-1 for the zero polynomial).
class ParamPolynomial {
 public:
  ParamPolynomial() = default;
  explicit ParamPolynomial(std::vector<cplx> coefficients);
  static ParamPolynomial constant(cplx c) { return ParamPolynomial({c}); }

  cplx operator()(cplx lambda) const;
  cplx derivative(cplx lambda) const;

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  std::span<const cplx> coefficients() const { return coeffs_; }

  bool operator==(const ParamPolynomial&) const = default;

 private:
  std::vector<cplx> coeffs_;
};

}  // namespace biflab

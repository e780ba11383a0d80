#include "biflab/param_poly.hpp"

namespace biflab {

ParamPolynomial::ParamPolynomial(std::vector<cplx> coefficients) : coeffs_(std::move(coefficients)) {
  while (!coeffs_.empty() && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
}

cplx ParamPolynomial::operator()(cplx lambda) const {
  if (coeffs_.empty()) return 0.0;
  cplx acc = coeffs_.back();
  for (std::size_t i = coeffs_.size() - 1; i-- > 0;) acc = acc * lambda + coeffs_[i];
  return acc;
}

cplx ParamPolynomial::derivative(cplx lambda) const {
  if (coeffs_.size() < 2) return 0.0;
  cplx acc = coeffs_.back() * static_cast<double>(coeffs_.size() - 1);
  for (std::size_t i = coeffs_.size() - 1; i-- > 1;) acc = acc * lambda + coeffs_[i] * static_cast<double>(i);
  return acc;
}

}  // namespace biflab

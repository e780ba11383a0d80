#pragma once

#include <span>
#include <vector>

#include "biflab/types.hpp"

namespace biflab {

/// Dense polynomial, ascending coefficients.
using Poly = std::vector<cplx>;

cplx poly_eval(std::span<const cplx> p, cplx z);
Poly poly_derivative(std::span<const cplx> p);
Poly poly_mul(std::span<const cplx> a, std::span<const cplx> b);
Poly poly_add(std::span<const cplx> a, std::span<const cplx> b);
Poly poly_sub(std::span<const cplx> a, std::span<const cplx> b);
Poly poly_scale(std::span<const cplx> a, cplx s);
/// Quotient of long division; the remainder is discarded (callers divide
/// exactly up to rounding).
Poly poly_divide(std::span<const cplx> num, std::span<const cplx> den);
/// Degree after ignoring trailing exact zeros (-1 for zero).
int poly_degree(std::span<const cplx> p);

struct Root {
  cplx value;
  int multiplicity = 1;
};

struct RootOptions {
  double cluster_radius = 1e-7;  // roots closer than this (relative) are merged
  double residual_tol = 1e-8;    // relative backward error accepted after polish
  int max_iterations = 500;
};

/// All roots of p by simultaneous Aberth–Ehrlich iteration followed by Newton
/// polish. Clusters are merged with summed multiplicity. Throws
/// RootFindingFailure when a polished residual exceeds residual_tol.
std::vector<Root> polynomial_roots(std::span<const cplx> p, const RootOptions& opt = {});

/// Roots repeated by multiplicity.
std::vector<cplx> expand_roots(const std::vector<Root>& roots);

/// Zeros on P^1 of the binary form Σ a_i x^i t^{n-i}, as unit vectors (x, t).
/// Roots outside the unit disc are refined in the chart s = t/x, so zeros at
/// or near infinity are found accurately. Multiplicities sum to n.
struct ProjRoot {
  HVec point;
  int multiplicity = 1;
};
std::vector<ProjRoot> binary_form_roots(std::span<const cplx> a, const RootOptions& opt = {});

}  // namespace biflab

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biflab/param_poly.hpp"
#include "biflab/types.hpp"

namespace biflab {

enum class FamilyKind { generic, polynomial, skew };

std::string_view to_string(FamilyKind kind);
FamilyKind family_kind_from_string(std::string_view s);

/// One monomial of a lifted coordinate form: coefficient(λ) · Π z_i^{e_i}.
struct Monomial {
  std::array<int, 3> exponents{};  // first k+1 entries are meaningful
  ParamPolynomial coefficient;
};

/// A one-parameter holomorphic family of degree-d endomorphisms of P^k, given
/// by a homogeneous lift F_λ : C^{k+1} -> C^{k+1} whose coefficients are
/// polynomials in λ. Immutable once constructed.
///
/// Coordinates are ordered (x, t) for k = 1 and (x, y, t) for k = 2; the
/// standard affine chart is t = 1.
///
/// kind = polynomial (k = 1): the last form is a(λ)·t^d and x^d is present.
/// kind = skew (k = 2): the first form involves only x and t, the last form is
/// a(λ)·t^d, and y^d is present in the middle form. Preimages of skew families
/// can be computed fiber by fiber.
class FamilySpec {
 public:
  FamilySpec(int k, int d, FamilyKind kind, std::vector<std::vector<Monomial>> coords,
             std::string label = {});

  int k() const { return k_; }
  int d() const { return d_; }
  FamilyKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  const std::vector<Monomial>& coord(int i) const { return coords_.at(static_cast<std::size_t>(i)); }

  bool lambda_independent() const;

  /// All preimages can be computed exactly (k = 1, or k = 2 skew products).
  bool fiberwise_solvable() const { return k_ == 1 || kind_ == FamilyKind::skew; }

  /// a(λ) in the last form a(λ)·t^d (polynomial and skew kinds only).
  cplx infinity_coefficient(cplx lambda) const;

 private:
  int k_;
  int d_;
  FamilyKind kind_;
  std::vector<std::vector<Monomial>> coords_;
  std::string label_;
};

/// F_λ with all λ-polynomials evaluated; cheap to copy, safe to share.
class Lift {
 public:
  Lift(const FamilySpec& spec, cplx lambda);

  int k() const { return k_; }
  int d() const { return d_; }
  cplx lambda() const { return lambda_; }

  HVec operator()(const HVec& z) const;
  /// Rows are output forms, columns are input coordinates.
  HMat jacobian(const HVec& z) const;
  cplx jacobian_det(const HVec& z) const;
  /// ∂F/∂λ at fixed z.
  HVec dlambda(const HVec& z) const;

  struct Jet {
    HVec value;
    HMat jacobian;
    HVec dlambda;
  };
  Jet jet(const HVec& z) const;

 private:
  struct Term {
    std::array<int, 3> e;
    cplx c;
    cplx dc;
  };
  int k_;
  int d_;
  cplx lambda_;
  std::array<std::vector<Term>, 3> terms_;
};

/// Point of P^k, stored with unit Euclidean norm; the first coordinate of
/// largest modulus is rotated onto the positive real axis.
class ProjPoint {
 public:
  explicit ProjPoint(const HVec& coords);

  const HVec& coords() const { return v_; }
  int k() const { return static_cast<int>(v_.size()) - 1; }
  double distance(const ProjPoint& other) const;  // chordal distance

 private:
  HVec v_;
};

/// (z, 1) with the 1 inserted at position `chart` (default: last).
HVec lift_point(const CVec& z, int chart = -1);
/// Chart coordinates of z̃; throws ChartOverflow when the chart coordinate
/// has modulus below 1e-300.
CVec dehomogenize(const HVec& z, int chart = -1);

/// f_λ in an affine chart, with first derivatives in z and λ.
class ChartMap {
 public:
  ChartMap(const FamilySpec& spec, cplx lambda, int chart = -1);

  int k() const { return lift_.k(); }
  int chart() const { return chart_; }
  const Lift& lift() const { return lift_; }

  CVec operator()(const CVec& z) const;

  struct Jet {
    CVec value;
    CMat jacobian;
    CVec dlambda;
  };
  Jet jet(const CVec& z) const;

 private:
  Lift lift_;
  int chart_;
};

HVec evaluate_lift(const FamilySpec& spec, cplx lambda, const HVec& z);
cplx jacobian_lift(const FamilySpec& spec, cplx lambda, const HVec& z);
CVec affine_map(const FamilySpec& spec, cplx lambda, const CVec& z, int chart = -1);

struct AffineJacobian {
  CMat matrix;
  cplx det;
};
AffineJacobian affine_jacobian(const FamilySpec& spec, cplx lambda, const CVec& z, int chart = -1);

/// log of the Jacobian determinant of f_λ for the Fubini–Study metric at [z̃]:
///   log|J_F(ẑ)| − log d − (k+1)·log‖F(ẑ)‖,  ẑ = z̃/‖z̃‖.
/// Equals log|det Df(z)| + ((k+1)/2)·log((1+|z|²)/(1+|f(z)|²)) in any chart.
double log_fs_jacobian(const Lift& lift, const HVec& z);

/// Probabilistic search for a common zero of the k+1 lifted forms on the unit
/// sphere (damped Gauss–Newton from `starts` random points). A miss is strong
/// evidence, not a proof, of non-degeneracy.
struct NondegeneracyReport {
  bool nondegenerate = true;
  std::optional<ProjPoint> witness;
  double min_residual = 0.0;
};
NondegeneracyReport check_nondegenerate(const FamilySpec& spec, cplx lambda, int starts = 200,
                                        std::uint64_t seed = 1);

/// For k = 1: f_λ = num/den in chart `chart` (1: z = x/t, 0: s = t/x), as
/// ascending coefficient vectors, with their λ-derivatives.
struct UnivariateChart {
  std::vector<cplx> num, den, dnum, dden;
};
UnivariateChart univariate_chart(const FamilySpec& spec, cplx lambda, int chart = 1);

}  // namespace biflab

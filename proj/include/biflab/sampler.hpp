#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biflab/family.hpp"
#include "biflab/roots.hpp"

namespace biflab {

/// Exact preimage solver for k = 1 families and k = 2 skew products.
class PreimageSolver {
 public:
  PreimageSolver(const FamilySpec& spec, cplx lambda);

  int k() const { return k_; }
  int d() const { return d_; }

  /// All d^k preimages of [target] as unit vectors, repeated by multiplicity.
  /// Throws RootFindingFailure when a preimage misses the target by more
  /// than 1e-9 (chordal for k = 1, relative chart distance for k = 2).
  std::vector<HVec> operator()(const HVec& target) const;

 private:
  int k_;
  int d_;
  Lift lift_;
  // k = 1: forms P, Q as coefficients of x^i t^{d-i}.
  Poly p_, q_;
  // k = 2 skew: base p(x, 1), fiber q(x, y, 1) as fiber_[ex][ey], and a(λ).
  std::vector<Poly> fiber_;
  cplx a_{1.0};
};

/// Chart preimages of z (standard chart), repeated by multiplicity.
std::vector<CVec> all_preimages(const FamilySpec& spec, cplx lambda, const CVec& z);

struct WalkOptions {
  int n_samples = 10000;
  int burn_in = 100;
  std::uint64_t seed = 1;
  int chains = 1;                // independent walks with seeds seed, seed+1, ...
  std::optional<CVec> start;     // default: random point with |z_i| in [0.5, 2]
};

/// Finite sample of the equilibrium measure; points are unit vectors in
/// C^{k+1} listed chain by chain in walk order.
struct MeasureCloud {
  cplx lambda;
  int k = 1;
  std::vector<HVec> points;
  int n_samples = 0;
  int burn_in = 0;
  std::uint64_t seed = 0;
  int chains = 1;
  std::string method = "backward-walk";
  int rebranched = 0;  // steps where the chosen preimage was rejected

  /// Standard-chart coordinates of point i (ChartOverflow on the line at ∞).
  CVec chart_point(std::size_t i) const { return dehomogenize(points[i]); }
};

/// Balanced backward random walk: each step replaces the current point by one
/// of its d^k preimages chosen uniformly at random. A preimage whose own
/// preimages cannot be resolved is rejected and the walk re-branches.
MeasureCloud backward_walk(const FamilySpec& spec, cplx lambda, const WalkOptions& opt = {});

/// True iff some cloud point lies within eps of z in the standard chart. A
/// one-sided heuristic: small clouds give false negatives.
bool julia_membership(const MeasureCloud& cloud, const CVec& z, double eps);

}  // namespace biflab

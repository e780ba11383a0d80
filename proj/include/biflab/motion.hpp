#pragma once

#include <vector>

#include "biflab/family.hpp"

namespace biflab {

struct MotionOptions {
  double rho = 0.01;
  int n_steps = 60;
  double tau = 0.05;      // radius of the tubes around E_0 where C² is sampled
  int radial = 2;         // lattice radii ρ·r/radial, r = 0..radial
  int angular = 8;
  int tube_samples = 16;  // per point and parameter, on the tube boundary and half radius
};

/// Holomorphic motion of a finite set of repelling periodic points, built
/// by iterating inverse branches along the base orbit.
struct MotionRecord {
  cplx base{0.0, 0.0};
  double rho = 0.0;
  std::vector<CVec> points;        // E_0, closed under f_0
  std::vector<int> periods;        // minimal period of each point
  int power = 1;                   // the motion is built for f^power
  std::vector<cplx> lambdas;       // lattice in the disc of radius ρ
  std::vector<std::vector<CVec>> images;  // images[l][i] = h_{λ_l}(points[i])

  double expansion = 0.0;          // K′: min smallest singular value of D(f^power) on E_0 × lattice
  double tube_expansion = 0.0;     // same on the τ-tubes (diagnostic)
  double second_derivative = 0.0;  // sampled sup of the second derivative on the tubes
  double parameter_derivative = 0.0;  // sampled sup of ‖∂_λ f^power‖ on E_0 × lattice
  double tau = 0.0;
  double delta = 0.0;

  std::vector<double> step_size;   // max over λ, z of ‖h_{n+1} − h_n‖, n = 0..n_steps−1
  double max_cauchy_ratio = 0.0;   // max ‖h_{n+1} − h_n‖ / ‖h_n − h_{n−1}‖ above noise
  double max_conjugacy_residual = 0.0;
  double min_separation = 0.0;     // min over λ of min pairwise |h_λ(z) − h_λ(z′)|
  bool preserves_cycles = true;    // period and repelling class kept at every λ
};

/// Orbit closure of the seed points, each of which must be periodic
/// (period ≤ 64). InvalidArgument otherwise.
std::vector<CVec> periodic_closure(const FamilySpec& spec, cplx lambda, const std::vector<CVec>& seeds,
                                   std::vector<int>* periods = nullptr);

/// Raises ExpansionHypothesisFailed when the expansion on E_0 does not exceed
/// 3 for f nor for f^q (q the lcm of the periods), and ContractionViolated when
/// δ < 2·sup‖∂_λ f^q‖·ρ or an iterate leaves its δ/2 ball or breaks the
/// geometric bound.
MotionRecord motion_hyperbolic(const FamilySpec& spec, cplx base, const std::vector<CVec>& seeds,
                               const MotionOptions& opt = {});

}  // namespace biflab

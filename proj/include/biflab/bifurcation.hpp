#pragma once

#include <cstdint>
#include <vector>

#include "biflab/lyapunov.hpp"

namespace biflab {

/// (1/2π)·5-point Laplacian of a Lyapunov field. The grid is the field's
/// grid; border cells and cells next to a missing value hold NaN.
struct BifurcationDensity {
  ParameterGrid grid;
  std::vector<double> values;
  double noise_floor = 0.0;  // 10·max stderr / min(dx, dy)²
  double threshold = 0.0;    // default support threshold, 5·noise_floor
};

BifurcationDensity ddc_density(const LyapunovField& field, double threshold_factor = 5.0);

/// Cells with density > threshold (NaN cells unmarked). InvalidArgument when
/// the threshold does not exceed the noise floor.
std::vector<std::uint8_t> support_mask(const BifurcationDensity& density, double threshold);
inline std::vector<std::uint8_t> support_mask(const BifurcationDensity& density) {
  return support_mask(density, density.threshold);
}

/// Mass proxy of the push-forwards of the critical set over a disc U:
///   m_n = d^{-n} Σ_c ∫_U [1 + |∂_λ f^n_λ(c(λ))|² / (1 + |f^n_λ(c(λ))|²)²] dA,
/// integrated on an n_theta × n_theta polar lattice. All critical points on
/// P^1 are used, except ∞ for polynomial families. Iteration runs in
/// homogeneous coordinates, so orbits through ∞ need no special handling.
struct MassGrowthReport {
  cplx center{0.0, 0.0};
  double radius = 0.0;
  int n_theta = 0;
  std::vector<int> n_list;
  std::vector<double> m_n;
  int critical_points = 0;
  std::string method = "graph-area polar quadrature";
};

MassGrowthReport mass_growth(const FamilySpec& spec, cplx center, double radius, int n_max, int n_theta = 128);

/// Parameter where the n0-th image of a critical point lands on a repelling
/// cycle of the given period.
struct MisiurewiczHit {
  cplx lambda{0.0, 0.0};
  int n0 = 0;
  int period = 0;
  double residual = 0.0;      // |f^{n0}(c) − γ| at λ
  cplx transversality{0.0, 0.0};  // d/dλ [f^{n0}_λ(c(λ)) − γ(λ)] at λ
  cplx critical_point{0.0, 0.0};
  cplx cycle_point{0.0, 0.0};
  double multiplier_modulus = 0.0;
};

struct MisiurewiczOptions {
  int n0_max = 3;
  int p_max = 2;
  double residual_tol = 1e-9;
  double repelling_margin = 1e-6;
  double transversality_min = 1e-6;
  double dedup_radius = 1e-8;
  int max_iterations = 60;
};

/// Newton on f^{n0}_λ(c(λ)) − γ(λ) from every cell of the grid, for every
/// affine critical point, every n0 ≤ n0_max and every repelling cycle point of
/// period ≤ p_max found at the start parameter (k = 1). Hits outside the grid
/// window are dropped; duplicates keep the smallest n0, then period.
std::vector<MisiurewiczHit> misiurewicz_scan(const FamilySpec& spec, const ParameterGrid& grid,
                                             const MisiurewiczOptions& opt = {});

struct SupportCoverage {
  std::vector<bool> covered;  // per hit
  bool all_covered = true;
};

/// A hit is covered when a cell within radius_cells (Chebyshev distance) of
/// the hit's cell has density above the threshold.
SupportCoverage misiurewicz_in_support(const std::vector<MisiurewiczHit>& hits, const BifurcationDensity& density,
                                       int radius_cells, double threshold);
inline SupportCoverage misiurewicz_in_support(const std::vector<MisiurewiczHit>& hits,
                                              const BifurcationDensity& density, int radius_cells) {
  return misiurewicz_in_support(hits, density, radius_cells, density.threshold);
}

}  // namespace biflab

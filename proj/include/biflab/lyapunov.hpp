#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "biflab/family.hpp"
#include "biflab/green.hpp"

namespace biflab {

enum class LyapunovMethod { backward_birkhoff, przytycki };

std::string_view to_string(LyapunovMethod m);
LyapunovMethod lyapunov_method_from_string(std::string_view s);

struct LyapunovEstimate {
  double value = 0.0;
  double std_error = 0.0;
  LyapunovMethod method = LyapunovMethod::backward_birkhoff;
  int n_samples = 0;
  int singular_skipped = 0;  // cloud points within 1e-12 of the critical set
};

struct BackwardOptions {
  int n_samples = 20000;
  int burn_in = 100;
  std::uint64_t seed = 1;
  int batches = 100;
};

/// Mean over a backward-walk cloud of the log Fubini–Study Jacobian
///   log|J_F(ẑ)| − log d − (k+1)·log‖F(ẑ)‖,  ẑ unit,
/// i.e. log|det Df| + ((k+1)/2)·log((1+|z|²)/(1+|f(z)|²)) in the chart.
///
/// The walk is a Markov chain, so the standard error comes from batch means
/// (`batches` consecutive blocks) rather than the iid formula.
///
/// Forward Birkhoff averages are not offered: inside hyperbolic components a
/// forward orbit is captured by an attracting cycle and estimates the
/// exponent of that cycle, not of the equilibrium measure.
LyapunovEstimate lyapunov_backward(const FamilySpec& spec, cplx lambda, const BackwardOptions& opt = {});

/// log d + Σ escape rates of the finite critical points (polynomial k = 1
/// families). std_error is (2d − 2)·tol.
LyapunovEstimate lyapunov_przytycki(const GreenEvaluator& green, cplx lambda);
LyapunovEstimate lyapunov_przytycki(const FamilySpec& spec, cplx lambda, double tol = 1e-9);

/// Regular cell-centred lattice: cell (i, j) sits at
///   center + (−width/2 + (i + ½)·width/nx) + i·(−height/2 + (j + ½)·height/ny).
struct ParameterGrid {
  cplx center{0.0, 0.0};
  double width = 1.0;
  double height = 1.0;
  int nx = 3;
  int ny = 3;

  cplx cell(int i, int j) const;
  double dx() const { return width / nx; }
  double dy() const { return height / ny; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i); }
  /// Nearest cell to λ (may lie outside [0, nx) × [0, ny)).
  std::pair<int, int> locate(cplx lambda) const;
  LambdaWindow window() const { return {center, width / 2.0, height / 2.0}; }
  void validate() const;
};

struct SweepConfig {
  LyapunovMethod method = LyapunovMethod::przytycki;
  double tol = 1e-9;          // przytycki
  int n_samples = 20000;      // backward
  int burn_in = 100;          // backward
  std::uint64_t seed = 1;     // per-cell seed = seed ⊕ splitmix64((i << 32) ⊕ j)
};

/// L over a parameter grid; values and std_errors are indexed by
/// grid.index(i, j). Cells whose estimate failed hold NaN.
struct LyapunovField {
  ParameterGrid grid;
  std::vector<double> values;
  std::vector<double> std_errors;
  SweepConfig config;
  double green_sup_bound = 0.0;
  int failed_cells = 0;

  double max_std_error() const;
};

LyapunovField sweep_grid(const FamilySpec& spec, const ParameterGrid& grid, const SweepConfig& config);

}  // namespace biflab

#pragma once

#include <cstdint>
#include <vector>

#include "biflab/family.hpp"

namespace biflab {

struct ContractionOptions {
  cplx center{0.0, 0.0};
  double window_radius = 0.01;  // parameters center + radius·{−1,0,1}² form the lattice
  int depth = 20;               // number of backward steps of f^p
  int period = 1;               // p
  double tau = 0.1;
  double epsilon = 0.1;
  int probes = 50;              // probe pairs in the disc around the orbit start
  double probe_radius = 1e-4;
  int burn_in = 200;            // backward-walk steps before the orbit start
  std::uint64_t seed = 1;
  int max_resamples = 20;
};

struct ContractionRow {
  int n = 0;
  double r_p = 0.0;           // inf over the lattice of ‖(Df^p)^{-1}‖^{-2} at the orbit point
  double bound = 0.0;         // Π_{j ≤ n} e^{τ+ε/3} r_p^{-1/2}
  double measured_lip = 0.0;  // max image/source displacement ratio over probe pairs and lattice
};

struct ContractionReport {
  std::vector<ContractionRow> rows;
  std::vector<cplx> lattice;
  std::vector<cplx> orbit;       // backward orbit at the center, γ_0, γ_{-p}, ...
  double fitted_rate = 0.0;      // A in measured_lip ≈ C·e^{−A n}
  double fitted_log_constant = 0.0;
  bool within_bound = true;
  int resamples = 0;             // orbits discarded for branch ambiguity
  std::uint64_t seed = 0;
};

/// Lipschitz constants of the inverse branch of f^p followed along a random
/// backward orbit (k = 1). The branch is chosen at the center parameter and
/// followed by continuity on the lattice. Raises BranchAmbiguity when every
/// resampled orbit comes within 1e-9 of a branch collision.
ContractionReport contraction_report(const FamilySpec& spec, const ContractionOptions& opt = {});

}  // namespace biflab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biflab/family.hpp"
#include "biflab/roots.hpp"

namespace biflab {

enum class CycleClass { repelling, attracting, neutral, saddle };

std::string_view to_string(CycleClass c);
CycleClass cycle_class_from_string(std::string_view s);

/// Classification with margin 1e-9 on the multiplier moduli.
CycleClass classify_multipliers(const std::vector<cplx>& multipliers);

/// Periodic orbit in the standard chart.
struct Cycle {
  cplx lambda{0.0, 0.0};
  int period = 1;
  std::vector<CVec> points;
  std::vector<cplx> multipliers;  // eigenvalues of D(f^p) at points[0]
  CycleClass classification = CycleClass::neutral;
  double residual = 0.0;          // max |f^p(x) − x| over the orbit (relative for |x| > 1)
};

/// Orbit, multipliers, residual and class of the cycle through x.
Cycle make_cycle(const FamilySpec& spec, cplx lambda, const CVec& x, int period);

/// D(f^p) at x along the orbit, and the product of the chain factors.
CMat cycle_derivative(const FamilySpec& spec, cplx lambda, const CVec& x, int period);

struct CycleEnumeration {
  std::vector<Cycle> cycles;
  bool complete = true;  // false: best-effort search (k = 2), some cycles may be missing
};

/// Cycles of exact period p in the standard chart.
///
/// k = 1: roots of the dynatomic polynomial Π_{q|p} (f^q(z) − z)^{μ(p/q)}
/// (numerators of the chart map), polished by Newton on f^p(z) − z. The
/// enumeration is complete for polynomial families; cycles through the
/// chart's point at infinity are not reported.
/// k = 2: Newton multistart from a backward-walk cloud; `complete` is false.
CycleEnumeration find_cycles(const FamilySpec& spec, cplx lambda, int period, std::uint64_t seed = 1,
                             int starts = 400);

/// Dynatomic polynomial of period p for a k = 1 family (ascending in z).
Poly dynatomic_polynomial(const FamilySpec& spec, cplx lambda, int period);

/// Newton on f^p(x) − x from x; returns nullopt when it does not converge.
std::optional<CVec> polish_periodic_point(const FamilySpec& spec, cplx lambda, const CVec& x, int period,
                                          int max_iterations = 50);

struct TrackOptions {
  double initial_step = 1e-2;  // fraction of each path segment
  double min_step = 1e-12;     // in λ units; reaching it breaks the track
};

/// A cycle continued along a polygonal path of parameters.
struct CycleTrack {
  std::vector<cplx> lambdas;   // path nodes reached
  std::vector<Cycle> cycles;   // cycle at each reached node
  double max_displacement = 0.0;        // largest accepted step-to-step move of points[0]
  double max_displacement_ratio = 0.0;  // max of move / (|Δλ|·max |dx/dλ| at the step ends)
  bool broken = false;
  std::string break_reason;
  // last good parameter and the first failing one (a crossing bracket when
  // a multiplier modulus changed side of 1)
  std::optional<std::pair<cplx, cplx>> bracket;
  std::optional<Cycle> bracket_cycle;  // cycle at bracket->first
};

CycleTrack continue_cycle(const FamilySpec& spec, const Cycle& start, const std::vector<cplx>& path,
                          const TrackOptions& opt = {});

/// Straight path λ_0 → λ_1 sampled at n + 1 equally spaced nodes.
std::vector<cplx> segment_path(cplx from, cplx to, int n);

struct CrossingEvent {
  cplx lambda{0.0, 0.0};
  int multiplier_index = 0;
  double modulus_before = 0.0;  // |w_j| at the bracket ends
  double modulus_after = 0.0;
  double modulus_at = 0.0;      // |w_j(λ*)|
  Cycle cycle;                  // cycle at λ*
  bool in_julia_before = false;
  bool in_julia_after = false;
  bool julia_checked = false;
};

struct CrossingOptions {
  double path_step = 1e-3;   // λ*±path_step used for the Julia flags
  double julia_eps = 0.02;
  int cloud_samples = 20000;
  std::uint64_t seed = 1;
  bool julia_flags = true;
};

/// Bisection of a track's crossing bracket to ||w_j| − 1| ≤ 1e-8, with
/// Julia-membership flags of the cycle at λ* ± path_step.
std::vector<CrossingEvent> crossing_detect(const FamilySpec& spec, const CycleTrack& track,
                                           const CrossingOptions& opt = {});

}  // namespace biflab

#include "biflab/lyapunov.hpp"

#include <cmath>
#include <limits>

#include "biflab/critical.hpp"
#include "biflab/errors.hpp"
#include "biflab/parallel.hpp"
#include "biflab/rng.hpp"
#include "biflab/sampler.hpp"

namespace biflab {

std::string_view to_string(LyapunovMethod m) {
  return m == LyapunovMethod::przytycki ? "przytycki" : "backward-birkhoff";
}

LyapunovMethod lyapunov_method_from_string(std::string_view s) {
  if (s == "przytycki") return LyapunovMethod::przytycki;
  if (s == "backward" || s == "backward-birkhoff") return LyapunovMethod::backward_birkhoff;
  throw Error(ErrorKind::InvalidArgument, "unknown Lyapunov method '" + std::string(s) + "'");
}

LyapunovEstimate lyapunov_backward(const FamilySpec& spec, cplx lambda, const BackwardOptions& opt) {
  if (opt.n_samples < 2 || opt.batches < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 samples and 2 batches");
  WalkOptions wo;
  wo.n_samples = opt.n_samples;
  wo.burn_in = opt.burn_in;
  wo.seed = opt.seed;
  const auto cloud = backward_walk(spec, lambda, wo);
  const Lift lift(spec, lambda);
  const double log_d = std::log(static_cast<double>(spec.d()));
  const double k1 = spec.k() + 1;

  LyapunovEstimate est;
  est.method = LyapunovMethod::backward_birkhoff;
  std::vector<double> vals;
  vals.reserve(cloud.points.size());
  for (const auto& z : cloud.points) {
    const auto j = lift.jet(z);
    const double jac = std::abs(j.jacobian.determinant());
    if (jac < 1e-12) {
      ++est.singular_skipped;
      continue;
    }
    vals.push_back(std::log(jac) - log_d - k1 * std::log(j.value.norm()));
  }
  const std::size_t n = vals.size();
  if (n < 2) throw Error(ErrorKind::DegenerateAtPoint, "cloud lies on the critical set");
  const std::size_t batches = std::min<std::size_t>(static_cast<std::size_t>(opt.batches), n / 2);
  const std::size_t size = n / batches;
  double total = 0.0;
  for (double v : vals) total += v;
  const double mean = total / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * size; i < (b + 1) * size; ++i) s += vals[i];
    const double dev = s / static_cast<double>(size) - mean;
    ss += dev * dev;
  }
  const double batch_sd = std::sqrt(ss / static_cast<double>(batches - 1));
  est.value = mean;
  // floor: the cloud of an exactly constant integrand still carries rounding
  est.std_error = std::max(batch_sd / std::sqrt(static_cast<double>(batches)), 1e-12 * std::max(1.0, std::abs(mean)));
  est.n_samples = static_cast<int>(n);
  return est;
}

LyapunovEstimate lyapunov_przytycki(const GreenEvaluator& green, cplx lambda) {
  const FamilySpec& spec = green.family();
  if (spec.k() != 1 || spec.kind() != FamilyKind::polynomial)
    throw Error(ErrorKind::UnsupportedFamily, "Przytycki's formula needs a polynomial k = 1 family");
  LyapunovEstimate est;
  est.method = LyapunovMethod::przytycki;
  const int d = spec.d();
  double sum = std::log(static_cast<double>(d));
  for (const auto& c : critical_points(spec, lambda))
    sum += c.multiplicity * green.escape_rate(lambda, c.value);
  est.value = sum;
  est.std_error = (2.0 * d - 2.0) * green.tol();
  est.n_samples = 0;
  return est;
}

LyapunovEstimate lyapunov_przytycki(const FamilySpec& spec, cplx lambda, double tol) {
  return lyapunov_przytycki(GreenEvaluator(spec, tol, LambdaWindow{lambda, 0.0, 0.0}), lambda);
}

cplx ParameterGrid::cell(int i, int j) const {
  return center + cplx(-width / 2.0 + (i + 0.5) * width / nx, -height / 2.0 + (j + 0.5) * height / ny);
}

std::pair<int, int> ParameterGrid::locate(cplx lambda) const {
  const cplx off = lambda - center;
  const int i = static_cast<int>(std::floor((off.real() + width / 2.0) / dx()));
  const int j = static_cast<int>(std::floor((off.imag() + height / 2.0) / dy()));
  return {i, j};
}

void ParameterGrid::validate() const {
  if (nx < 3 || ny < 3) throw Error(ErrorKind::GridTooSmall, "grid needs at least 3x3 cells");
  if (!(width > 0.0) || !(height > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid width and height must be positive");
}

double LyapunovField::max_std_error() const {
  double m = 0.0;
  for (double s : std_errors)
    if (std::isfinite(s)) m = std::max(m, s);
  return m;
}

LyapunovField sweep_grid(const FamilySpec& spec, const ParameterGrid& grid, const SweepConfig& config) {
  grid.validate();
  LyapunovField field;
  field.grid = grid;
  field.config = config;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  field.values.assign(grid.size(), nan);
  field.std_errors.assign(grid.size(), nan);
  std::optional<GreenEvaluator> green;
  if (config.method == LyapunovMethod::przytycki) {
    green.emplace(spec, config.tol, grid.window());
    field.green_sup_bound = green->sup_bound();
  }
  std::vector<char> failed(grid.size(), 0);
  parallel_for(grid.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx % static_cast<std::size_t>(grid.nx));
    const int j = static_cast<int>(idx / static_cast<std::size_t>(grid.nx));
    const cplx lambda = grid.cell(i, j);
    try {
      LyapunovEstimate est;
      if (green) {
        est = lyapunov_przytycki(*green, lambda);
      } else {
        BackwardOptions bo;
        bo.n_samples = config.n_samples;
        bo.burn_in = config.burn_in;
        bo.seed = cell_seed(config.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
        est = lyapunov_backward(spec, lambda, bo);
      }
      field.values[idx] = est.value;
      field.std_errors[idx] = est.std_error;
    } catch (const Error&) {
      failed[idx] = 1;
    }
  });
  for (char f : failed) field.failed_cells += f;
  return field;
}

}  // namespace biflab

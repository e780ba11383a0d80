#include "biflab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "biflab/bifurcation.hpp"
#include "biflab/contraction.hpp"
#include "biflab/critical.hpp"
#include "biflab/cycles.hpp"
#include "biflab/errors.hpp"
#include "biflab/export.hpp"
#include "biflab/family_io.hpp"
#include "biflab/green.hpp"
#include "biflab/lyapunov.hpp"
#include "biflab/motion.hpp"
#include "biflab/sampler.hpp"

namespace biflab {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

// "re,im" or "re,im,re,im"
std::vector<cplx> parse_complex_list(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad complex literal '" + s + "'");
    }
    if (used != item.size()) throw Error(ErrorKind::InvalidArgument, "bad complex literal '" + s + "'");
    parts.push_back(v);
  }
  if (parts.empty() || parts.size() % 2 != 0 || s.back() == ',')
    throw Error(ErrorKind::InvalidArgument, "complex literal must be re,im: '" + s + "'");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < parts.size(); i += 2) out.emplace_back(parts[i], parts[i + 1]);
  return out;
}

cplx parse_complex(const std::string& s) {
  const auto v = parse_complex_list(s);
  if (v.size() != 1) throw Error(ErrorKind::InvalidArgument, "expected a single complex literal re,im: '" + s + "'");
  return v[0];
}

CVec parse_point(const std::string& s, int k) {
  const auto v = parse_complex_list(s);
  if (static_cast<int>(v.size()) != k)
    throw Error(ErrorKind::InvalidArgument, "point '" + s + "' needs " + std::to_string(k) + " complex coordinates");
  CVec z(k);
  for (int i = 0; i < k; ++i) z[i] = v[static_cast<std::size_t>(i)];
  return z;
}

const CLI::Validator complex_literal(
    [](std::string& s) -> std::string {
      try {
        parse_complex_list(s);
      } catch (const Error& e) {
        return e.what();
      }
      return {};
    },
    "RE,IM");

// Parameter structs serialise through nlohmann::json (keys sorted), then
// convert to the ordered flavour used for output files.
template <class T>
json params_json(const T& p) {
  return json::parse(nlohmann::json(p).dump());
}

template <class T>
T params_from(const json& j) {
  return nlohmann::json::parse(j.dump()).get<T>();
}

std::string fmt(double x) { return format_real(x); }
std::string fmt(cplx z) { return format_real(z.real()) + "," + format_real(z.imag()); }

// ---------------------------------------------------------------------------
// Parameters of each subcommand; stored verbatim in the manifest.

struct GreenParams {
  std::string lambda = "0,0";
  std::string z = "0,0";
  double tol = 1e-9;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GreenParams, lambda, z, tol)

struct CloudParams {
  std::string lambda = "0,0";
  int samples = 10000;
  int burn_in = 100;
  std::uint64_t seed = 1;
  int chains = 1;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CloudParams, lambda, samples, burn_in, seed, chains)

struct LyapParams {
  std::string lambda = "0,0";
  std::string method = "przytycki";
  double tol = 1e-9;
  int samples = 20000;
  int burn_in = 100;
  std::uint64_t seed = 1;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LyapParams, lambda, method, tol, samples, burn_in, seed)

struct GridParams {
  std::string center = "0,0";
  double width = 1.0;
  double height = 1.0;
  int nx = 64;
  int ny = 64;
  std::string method = "przytycki";
  double tol = 1e-9;
  int samples = 20000;
  int burn_in = 100;
  std::uint64_t seed = 1;
  double threshold_factor = 5.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GridParams, center, width, height, nx, ny, method, tol, samples,
                                                burn_in, seed, threshold_factor)

struct MassParams {
  std::string center = "0,0";
  double radius = 0.05;
  int n_max = 20;
  int n_theta = 128;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MassParams, center, radius, n_max, n_theta)

struct CyclesParams {
  std::string lambda = "0,0";
  int period = 1;
  std::uint64_t seed = 1;
  int starts = 400;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CyclesParams, lambda, period, seed, starts)

struct TrackParams {
  std::string from = "0,0";
  std::string to = "0,0";
  std::string start;
  int period = 1;
  int nodes = 50;
  double min_step = 1e-12;
  bool julia_flags = true;
  int cloud_samples = 20000;
  double julia_eps = 0.02;
  double path_step = 1e-3;
  std::uint64_t seed = 1;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrackParams, from, to, start, period, nodes, min_step, julia_flags,
                                                cloud_samples, julia_eps, path_step, seed)

struct MotionParams {
  std::string lambda = "0,0";
  std::vector<std::string> points;
  double rho = 0.01;
  int steps = 60;
  double tau = 0.05;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MotionParams, lambda, points, rho, steps, tau)

struct MisiurewiczParams {
  std::string center = "0,0";
  double width = 1.0;
  double height = 1.0;
  int nx = 16;
  int ny = 16;
  int n0_max = 3;
  int p_max = 2;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MisiurewiczParams, center, width, height, nx, ny, n0_max, p_max)

struct ContractionParams {
  std::string center = "0,0";
  double radius = 0.01;
  int depth = 20;
  int period = 1;
  int probes = 50;
  double probe_radius = 1e-4;
  double tau = 0.1;
  double epsilon = 0.1;
  std::uint64_t seed = 1;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ContractionParams, center, radius, depth, period, probes, probe_radius,
                                                tau, epsilon, seed)

// ---------------------------------------------------------------------------

struct Family {
  std::string source;
  std::string text;
  FamilySpec spec;
};

Family load_family_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read family file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  FamilySpec spec = parse_family(text);
  return {fs::path(path).filename().string(), std::move(text), std::move(spec)};
}

struct RunContext {
  const Family& family;
  std::optional<fs::path> out_dir;
  std::ostream& out;
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return *out_dir / name;
  }
  fs::path require_out(const std::string& command) const {
    if (!out_dir) throw Error(ErrorKind::InvalidArgument, command + " needs --out");
    return *out_dir;
  }
};

ParameterGrid grid_of(const std::string& center, double width, double height, int nx, int ny) {
  ParameterGrid g{parse_complex(center), width, height, nx, ny};
  g.validate();
  return g;
}

SweepConfig sweep_of(const GridParams& p) {
  SweepConfig sc;
  sc.method = lyapunov_method_from_string(p.method);
  sc.tol = p.tol;
  sc.n_samples = p.samples;
  sc.burn_in = p.burn_in;
  sc.seed = p.seed;
  return sc;
}

void run_green(RunContext& ctx, const json& pj) {
  const auto p = params_from<GreenParams>(pj);
  const auto& spec = ctx.family.spec;
  const cplx lambda = parse_complex(p.lambda);
  const CVec z = parse_point(p.z, spec.k());
  const GreenEvaluator green(spec, p.tol, LambdaWindow{lambda, 0.0, 0.0});
  const GreenValue v = green.value(lambda, lift_point(z));
  const double g = v.value - std::log(lift_point(z).norm());
  ctx.out << "g=" << fmt(g) << " G=" << fmt(v.value) << " error_bound=" << fmt(v.error_bound)
          << " n_steps=" << v.n_steps;
  if (spec.k() == 1 && spec.kind() == FamilyKind::polynomial) ctx.out << " escape_rate=" << fmt(green.escape_rate(lambda, z[0]));
  ctx.out << '\n';
}

void run_cloud(RunContext& ctx, const json& pj) {
  const auto p = params_from<CloudParams>(pj);
  const fs::path dir = ctx.require_out("cloud");
  (void)dir;
  WalkOptions wo;
  wo.n_samples = p.samples;
  wo.burn_in = p.burn_in;
  wo.seed = p.seed;
  wo.chains = p.chains;
  const auto cloud = backward_walk(ctx.family.spec, parse_complex(p.lambda), wo);
  write_cloud_csv(ctx.file("cloud.csv"), cloud);
  ctx.out << "points=" << cloud.points.size() << " rebranched=" << cloud.rebranched << '\n';
}

void run_lyap(RunContext& ctx, const json& pj) {
  const auto p = params_from<LyapParams>(pj);
  const cplx lambda = parse_complex(p.lambda);
  LyapunovEstimate est;
  if (lyapunov_method_from_string(p.method) == LyapunovMethod::przytycki) {
    est = lyapunov_przytycki(ctx.family.spec, lambda, p.tol);
  } else {
    BackwardOptions bo;
    bo.n_samples = p.samples;
    bo.burn_in = p.burn_in;
    bo.seed = p.seed;
    est = lyapunov_backward(ctx.family.spec, lambda, bo);
  }
  ctx.out << "L=" << fmt(est.value) << " stderr=" << fmt(est.std_error) << " method=" << to_string(est.method)
          << '\n';
}

LyapunovField sweep(RunContext& ctx, const GridParams& p) {
  const auto field = sweep_grid(ctx.family.spec, grid_of(p.center, p.width, p.height, p.nx, p.ny), sweep_of(p));
  write_field(ctx.file("L.csv"), ctx.file("L.json"), field);
  return field;
}

void run_lyap_map(RunContext& ctx, const json& pj) {
  ctx.require_out("lyap-map");
  const auto field = sweep(ctx, params_from<GridParams>(pj));
  ctx.out << "cells=" << field.grid.size() << " failed=" << field.failed_cells
          << " max_stderr=" << fmt(field.max_std_error()) << '\n';
}

void run_bif_map(RunContext& ctx, const json& pj) {
  ctx.require_out("bif-map");
  const auto p = params_from<GridParams>(pj);
  const auto field = sweep(ctx, p);
  const auto density = ddc_density(field, p.threshold_factor);
  write_density(ctx.file("density.csv"), ctx.file("density.json"), density);
  write_density_pgm(ctx.file("density.pgm"), density);
  const auto mask = support_mask(density);
  write_mask_csv(ctx.file("mask.csv"), density.grid, mask);
  int marked = 0;
  for (auto m : mask) marked += m;
  ctx.out << "noise_floor=" << fmt(density.noise_floor) << " threshold=" << fmt(density.threshold)
          << " marked=" << marked << " failed=" << field.failed_cells << '\n';
}

void run_mass_growth(RunContext& ctx, const json& pj) {
  const auto p = params_from<MassParams>(pj);
  const auto rep = mass_growth(ctx.family.spec, parse_complex(p.center), p.radius, p.n_max, p.n_theta);
  for (std::size_t i = 0; i < rep.n_list.size(); ++i) ctx.out << "n=" << rep.n_list[i] << " m=" << fmt(rep.m_n[i]) << '\n';
  if (ctx.out_dir) write_mass_csv(ctx.file("mass.csv"), rep);
}

void run_cycles(RunContext& ctx, const json& pj) {
  const auto p = params_from<CyclesParams>(pj);
  const auto e = find_cycles(ctx.family.spec, parse_complex(p.lambda), p.period, p.seed, p.starts);
  json arr = json::array();
  for (const auto& c : e.cycles) {
    ctx.out << "point=";
    for (int i = 0; i < c.points[0].size(); ++i) ctx.out << (i ? ";" : "") << fmt(c.points[0][i]);
    ctx.out << " class=" << to_string(c.classification) << " multipliers=";
    for (std::size_t i = 0; i < c.multipliers.size(); ++i) ctx.out << (i ? ";" : "") << fmt(c.multipliers[i]);
    ctx.out << '\n';
    arr.push_back(cycle_to_json(c));
  }
  ctx.out << "cycles=" << e.cycles.size() << " complete=" << (e.complete ? "true" : "false") << '\n';
  if (ctx.out_dir) write_json(ctx.file("tracks.json"), {{"cycles", arr}, {"complete", e.complete}});
}

void run_track(RunContext& ctx, const json& pj) {
  const auto p = params_from<TrackParams>(pj);
  const auto& spec = ctx.family.spec;
  const cplx from = parse_complex(p.from), to = parse_complex(p.to);
  if (p.start.empty()) throw Error(ErrorKind::InvalidArgument, "track needs --start");
  const auto polished = polish_periodic_point(spec, from, parse_point(p.start, spec.k()), p.period);
  if (!polished) throw Error(ErrorKind::RootFindingFailure, "no cycle of that period near --start");
  const Cycle start = make_cycle(spec, from, *polished, p.period);
  TrackOptions to_opt;
  to_opt.min_step = p.min_step;
  const auto track = continue_cycle(spec, start, segment_path(from, to, std::max(1, p.nodes)), to_opt);
  CrossingOptions co;
  co.julia_flags = p.julia_flags;
  co.cloud_samples = p.cloud_samples;
  co.julia_eps = p.julia_eps;
  co.path_step = p.path_step;
  co.seed = p.seed;
  const auto events = crossing_detect(spec, track, co);
  ctx.out << "nodes=" << track.cycles.size() << " broken=" << (track.broken ? "true" : "false");
  if (track.broken) ctx.out << " reason=\"" << track.break_reason << '"';
  ctx.out << '\n';
  for (const auto& ev : events)
    ctx.out << "crossing lambda=" << fmt(ev.lambda) << " index=" << ev.multiplier_index
            << " modulus=" << fmt(ev.modulus_at) << '\n';
  if (ctx.out_dir) write_json(ctx.file("tracks.json"), {{"track", track_to_json(track)}, {"events", events_to_json(events)}});
}

void run_motion(RunContext& ctx, const json& pj) {
  const auto p = params_from<MotionParams>(pj);
  const auto& spec = ctx.family.spec;
  if (p.points.empty()) throw Error(ErrorKind::InvalidArgument, "motion needs at least one --point");
  std::vector<CVec> seeds;
  for (const auto& s : p.points) seeds.push_back(parse_point(s, spec.k()));
  MotionOptions mo;
  mo.rho = p.rho;
  mo.n_steps = p.steps;
  mo.tau = p.tau;
  const auto rec = motion_hyperbolic(spec, parse_complex(p.lambda), seeds, mo);
  ctx.out << "points=" << rec.points.size() << " power=" << rec.power << " K'=" << fmt(rec.expansion)
          << " delta=" << fmt(rec.delta) << " max_cauchy_ratio=" << fmt(rec.max_cauchy_ratio)
          << " conjugacy_residual=" << fmt(rec.max_conjugacy_residual)
          << " preserves_cycles=" << (rec.preserves_cycles ? "true" : "false") << '\n';
  if (ctx.out_dir) write_json(ctx.file("motion.json"), motion_to_json(rec));
}

void run_misiurewicz(RunContext& ctx, const json& pj) {
  const auto p = params_from<MisiurewiczParams>(pj);
  MisiurewiczOptions mo;
  mo.n0_max = p.n0_max;
  mo.p_max = p.p_max;
  const auto hits = misiurewicz_scan(ctx.family.spec, grid_of(p.center, p.width, p.height, p.nx, p.ny), mo);
  for (const auto& h : hits)
    ctx.out << "lambda=" << fmt(h.lambda) << " n0=" << h.n0 << " period=" << h.period
            << " residual=" << fmt(h.residual) << " transversality=" << fmt(std::abs(h.transversality)) << '\n';
  ctx.out << "hits=" << hits.size() << '\n';
  if (ctx.out_dir) write_json(ctx.file("hits.json"), hits_to_json(hits));
}

void run_contraction(RunContext& ctx, const json& pj) {
  const auto p = params_from<ContractionParams>(pj);
  ContractionOptions co;
  co.center = parse_complex(p.center);
  co.window_radius = p.radius;
  co.depth = p.depth;
  co.period = p.period;
  co.probes = p.probes;
  co.probe_radius = p.probe_radius;
  co.tau = p.tau;
  co.epsilon = p.epsilon;
  co.seed = p.seed;
  const auto rep = contraction_report(ctx.family.spec, co);
  for (const auto& r : rep.rows)
    ctx.out << "n=" << r.n << " r_p=" << fmt(r.r_p) << " bound=" << fmt(r.bound) << " measured_lip=" << fmt(r.measured_lip)
            << '\n';
  ctx.out << "A=" << fmt(rep.fitted_rate) << " within_bound=" << (rep.within_bound ? "true" : "false")
          << " resamples=" << rep.resamples << '\n';
  if (ctx.out_dir) write_contraction_csv(ctx.file("report.csv"), rep);
}

using Runner = void (*)(RunContext&, const json&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"green", run_green},           {"cloud", run_cloud},         {"lyap", run_lyap},
      {"lyap-map", run_lyap_map},     {"bif-map", run_bif_map},     {"mass-growth", run_mass_growth},
      {"cycles", run_cycles},         {"track", run_track},         {"motion", run_motion},
      {"misiurewicz", run_misiurewicz}, {"contraction", run_contraction}};
  return table;
}

void execute(const std::string& command, const Family& family, const json& params,
             const std::optional<fs::path>& out_dir, std::ostream& out) {
  if (out_dir) fs::create_directories(*out_dir);
  RunContext ctx{family, out_dir, out, {}};
  runners().at(command)(ctx, params);
  if (out_dir) {
    ctx.outputs.push_back("manifest.json");
    json manifest = {{"tool", "biflab"},
                     {"version", kVersion},
                     {"command", command},
                     {"family", {{"source", family.source}, {"text", family.text}}},
                     {"params", params},
                     {"outputs", ctx.outputs}};
    write_json(*out_dir / "manifest.json", manifest);
  }
}

// ---------------------------------------------------------------------------
// selftest: quick closed-form examples

const char* kQuadratic = "[family]\nk = 1\nd = 2\nkind = polynomial\nlabel = z^2 + lambda\n\n"
                         "[coord 0]\n2 0 : 1,0\n0 2 : 0,0 1,0\n\n[coord 1]\n0 2 : 1,0\n";
const char* kSquare = "[family]\nk = 1\nd = 2\nkind = polynomial\nlabel = z^2\n\n"
                      "[coord 0]\n2 0 : 1,0\n\n[coord 1]\n0 2 : 1,0\n";

int run_selftest(std::ostream& out) {
  const FamilySpec quad = parse_family(kQuadratic);
  const FamilySpec square = parse_family(kSquare);
  const double log2 = std::log(2.0);
  std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"green z^2+0 at 0 vanishes",
       [&] { return std::abs(GreenEvaluator(quad, 1e-9).affine(0.0, cvec(0.0))) <= 1e-9; }},
      {"green z^2 at 2 is log 2",
       [&] { return std::abs(GreenEvaluator(square, 1e-9).escape_rate(0.0, 2.0) - log2) <= 1e-8; }},
      {"przytycki at 0 is log 2", [&] { return std::abs(lyapunov_przytycki(quad, 0.0).value - log2) <= 1e-6; }},
      {"przytycki at -2 is log 2", [&] { return std::abs(lyapunov_przytycki(quad, -2.0).value - log2) <= 1e-6; }},
      {"backward estimate for z^2",
       [&] {
         BackwardOptions bo;
         bo.n_samples = 5000;
         const auto e = lyapunov_backward(square, 0.0, bo);
         return std::abs(e.value - log2) <= 3.0 * e.std_error + 1e-12;
       }},
      {"fixed points of z^2",
       [&] {
         const auto e = find_cycles(quad, 0.0, 1);
         return e.cycles.size() == 2;
       }},
      {"superattracting 2-cycle at -1",
       [&] {
         const auto e = find_cycles(quad, -1.0, 2);
         return e.cycles.size() == 1 && std::abs(e.cycles[0].multipliers[0]) < 1e-10;
       }},
      {"density of |lambda|^2 is 2/pi",
       [&] {
         LyapunovField f;
         f.grid = ParameterGrid{0.0, 1.0, 1.0, 5, 5};
         for (int j = 0; j < 5; ++j)
           for (int i = 0; i < 5; ++i) {
             f.values.push_back(std::norm(f.grid.cell(i, j)));
             f.std_errors.push_back(1e-12);
           }
         const auto d = ddc_density(f);
         return std::abs(d.values[d.grid.index(2, 2)] - 2.0 / kPi) <= 1e-10;
       }},
      {"mass growth of z^2 halves",
       [&] {
         const auto r = mass_growth(square, 0.0, 0.1, 3, 8);
         return std::abs(r.m_n[2] / r.m_n[1] - 0.5) <= 1e-12;
       }},
      {"Misiurewicz parameter -2",
       [&] {
         MisiurewiczOptions mo;
         mo.p_max = 1;
         for (const auto& h : misiurewicz_scan(quad, ParameterGrid{-2.0, 0.2, 0.2, 3, 3}, mo))
           if (std::abs(h.lambda + 2.0) < 1e-9) return true;
         return false;
       }},
      {"motion of the fixed point 2",
       [&] {
         const auto rec = motion_hyperbolic(quad, -2.0, {cvec(2.0)});
         const cplx lam = rec.lambdas.back();
         return std::abs(rec.images.back()[0][0] - (1.0 + std::sqrt(1.0 - 4.0 * lam)) / 2.0) <= 1e-10;
       }},
      {"contraction of z^2 branches",
       [&] {
         ContractionOptions co;
         co.depth = 5;
         const auto rep = contraction_report(square, co);
         return std::abs(rep.rows[0].r_p - 4.0) < 1e-12 && rep.within_bound;
       }},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const Error& e) {
      out << "  (" << e.name() << ") ";
    }
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    failed += ok ? 0 : 1;
  }
  out << (failed == 0 ? "selftest passed" : "selftest failed") << '\n';
  return failed == 0 ? 0 : 2;
}

// ---------------------------------------------------------------------------

struct Subcommand {
  CLI::App* app = nullptr;
  std::function<json()> params;
};

void add_grid_flags(CLI::App* sub, std::string& center, double& width, double& height, int& nx, int& ny) {
  sub->add_option("--center", center, "grid center re,im")->check(complex_literal);
  sub->add_option("--width", width, "grid width")->check(CLI::PositiveNumber);
  sub->add_option("--height", height, "grid height")->check(CLI::PositiveNumber);
  sub->add_option("--nx", nx, "cells along Re")->check(CLI::PositiveNumber);
  sub->add_option("--ny", ny, "cells along Im")->check(CLI::PositiveNumber);
}

void add_method_flags(CLI::App* sub, std::string& method, double& tol, int& samples, int& burn_in,
                      std::uint64_t& seed) {
  sub->add_option("--method", method, "przytycki or backward")
      ->check(CLI::IsMember({"przytycki", "backward", "backward_birkhoff"}));
  sub->add_option("--tol", tol, "Green tolerance (przytycki)")->check(CLI::PositiveNumber);
  sub->add_option("--samples", samples, "backward-walk samples")->check(CLI::PositiveNumber);
  sub->add_option("--burn-in", burn_in, "backward-walk burn-in")->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", seed, "random seed");
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lyapunov exponents and bifurcation currents of holomorphic families", "biflab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string family_path, out_dir;
  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--family", family_path, "family definition file")->required()->check(CLI::ExistingFile);
    auto* o = sub->add_option("--out", out_dir, "output directory");
    if (needs_out) o->required();
  };

  std::map<std::string, Subcommand> subs;

  GreenParams green;
  {
    auto* s = app.add_subcommand("green", "Green function at a point");
    add_common(s, false);
    s->add_option("--lambda", green.lambda, "parameter re,im")->check(complex_literal);
    s->add_option("--z", green.z, "point re,im (k=2: re,im,re,im)")->check(complex_literal);
    s->add_option("--tol", green.tol, "truncation tolerance")->check(CLI::PositiveNumber);
    subs["green"] = {s, [&] { return params_json(green); }};
  }
  CloudParams cloud;
  {
    auto* s = app.add_subcommand("cloud", "sample the equilibrium measure");
    add_common(s, true);
    s->add_option("--lambda", cloud.lambda, "parameter re,im")->check(complex_literal);
    s->add_option("--samples", cloud.samples)->check(CLI::PositiveNumber);
    s->add_option("--burn-in", cloud.burn_in)->check(CLI::NonNegativeNumber);
    s->add_option("--seed", cloud.seed);
    s->add_option("--chains", cloud.chains)->check(CLI::PositiveNumber);
    subs["cloud"] = {s, [&] { return params_json(cloud); }};
  }
  LyapParams lyap;
  {
    auto* s = app.add_subcommand("lyap", "Lyapunov exponent at one parameter");
    add_common(s, false);
    s->add_option("--lambda", lyap.lambda, "parameter re,im")->check(complex_literal);
    add_method_flags(s, lyap.method, lyap.tol, lyap.samples, lyap.burn_in, lyap.seed);
    subs["lyap"] = {s, [&] { return params_json(lyap); }};
  }
  GridParams lmap, bmap;
  for (auto [name, params, help] : {std::tuple{"lyap-map", &lmap, "Lyapunov field on a grid"},
                                    std::tuple{"bif-map", &bmap, "bifurcation density, image and support"}}) {
    auto* s = app.add_subcommand(name, help);
    add_common(s, true);
    add_grid_flags(s, params->center, params->width, params->height, params->nx, params->ny);
    add_method_flags(s, params->method, params->tol, params->samples, params->burn_in, params->seed);
    if (std::string(name) == "bif-map")
      s->add_option("--threshold-factor", params->threshold_factor, "support threshold in noise floors")
          ->check(CLI::PositiveNumber);
    GridParams* ptr = params;
    subs[name] = {s, [ptr] { return params_json(*ptr); }};
  }
  MassParams mass;
  {
    auto* s = app.add_subcommand("mass-growth", "mass of critical push-forwards over a disc");
    add_common(s, false);
    s->add_option("--center", mass.center, "disc center re,im")->check(complex_literal);
    s->add_option("--radius", mass.radius)->check(CLI::PositiveNumber);
    s->add_option("--n-max", mass.n_max)->check(CLI::PositiveNumber);
    s->add_option("--n-theta", mass.n_theta)->check(CLI::PositiveNumber);
    subs["mass-growth"] = {s, [&] { return params_json(mass); }};
  }
  CyclesParams cycles;
  {
    auto* s = app.add_subcommand("cycles", "cycles of exact period");
    add_common(s, false);
    s->add_option("--lambda", cycles.lambda, "parameter re,im")->check(complex_literal);
    s->add_option("--period", cycles.period)->check(CLI::PositiveNumber);
    s->add_option("--seed", cycles.seed);
    s->add_option("--starts", cycles.starts, "Newton starts (k=2)")->check(CLI::PositiveNumber);
    subs["cycles"] = {s, [&] { return params_json(cycles); }};
  }
  TrackParams track;
  {
    auto* s = app.add_subcommand("track", "continue a cycle along a segment and locate crossings");
    add_common(s, false);
    s->add_option("--from", track.from, "start parameter re,im")->check(complex_literal)->required();
    s->add_option("--to", track.to, "end parameter re,im")->check(complex_literal)->required();
    s->add_option("--start", track.start, "cycle point at --from")->check(complex_literal)->required();
    s->add_option("--period", track.period)->check(CLI::PositiveNumber);
    s->add_option("--nodes", track.nodes, "path segments")->check(CLI::PositiveNumber);
    s->add_option("--min-step", track.min_step)->check(CLI::PositiveNumber);
    s->add_option("--julia-flags", track.julia_flags);
    s->add_option("--cloud-samples", track.cloud_samples)->check(CLI::PositiveNumber);
    s->add_option("--julia-eps", track.julia_eps)->check(CLI::PositiveNumber);
    s->add_option("--path-step", track.path_step)->check(CLI::PositiveNumber);
    s->add_option("--seed", track.seed);
    subs["track"] = {s, [&] { return params_json(track); }};
  }
  MotionParams motion;
  {
    auto* s = app.add_subcommand("motion", "holomorphic motion of repelling cycles");
    add_common(s, false);
    s->add_option("--lambda", motion.lambda, "base parameter re,im")->check(complex_literal);
    s->add_option("--point", motion.points, "cycle point (repeatable)")->check(complex_literal)->required();
    s->add_option("--rho", motion.rho)->check(CLI::PositiveNumber);
    s->add_option("--steps", motion.steps)->check(CLI::PositiveNumber);
    s->add_option("--tau", motion.tau)->check(CLI::PositiveNumber);
    subs["motion"] = {s, [&] { return params_json(motion); }};
  }
  MisiurewiczParams mis;
  {
    auto* s = app.add_subcommand("misiurewicz", "scan for Misiurewicz parameters");
    add_common(s, false);
    add_grid_flags(s, mis.center, mis.width, mis.height, mis.nx, mis.ny);
    s->add_option("--n0-max", mis.n0_max)->check(CLI::PositiveNumber);
    s->add_option("--p-max", mis.p_max)->check(CLI::PositiveNumber);
    subs["misiurewicz"] = {s, [&] { return params_json(mis); }};
  }
  ContractionParams con;
  {
    auto* s = app.add_subcommand("contraction", "Lipschitz constants of inverse branches");
    add_common(s, false);
    s->add_option("--center", con.center, "parameter re,im")->check(complex_literal);
    s->add_option("--radius", con.radius, "parameter lattice radius")->check(CLI::PositiveNumber);
    s->add_option("--depth", con.depth)->check(CLI::PositiveNumber);
    s->add_option("--period", con.period)->check(CLI::PositiveNumber);
    s->add_option("--probes", con.probes)->check(CLI::PositiveNumber);
    s->add_option("--probe-radius", con.probe_radius)->check(CLI::PositiveNumber);
    s->add_option("--tau", con.tau)->check(CLI::NonNegativeNumber);
    s->add_option("--epsilon", con.epsilon)->check(CLI::NonNegativeNumber);
    s->add_option("--seed", con.seed);
    subs["contraction"] = {s, [&] { return params_json(con); }};
  }
  auto* selftest = app.add_subcommand("selftest", "run the built-in closed-form examples");
  std::string manifest_path, replay_out;
  auto* replay = app.add_subcommand("replay", "rerun a manifest");
  replay->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "output directory")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (selftest->parsed()) return run_selftest(out);
    if (replay->parsed()) {
      const json m = read_json(manifest_path);
      const std::string command = m.at("command").get<std::string>();
      if (!runners().count(command)) throw Error(ErrorKind::InvalidArgument, "unknown command in manifest: " + command);
      const std::string text = m.at("family").at("text").get<std::string>();
      const Family family{m.at("family").at("source").get<std::string>(), text, parse_family(text)};
      execute(command, family, m.at("params"), fs::path(replay_out), out);
      return 0;
    }
    for (auto& [name, sub] : subs) {
      if (!sub.app->parsed()) continue;
      const Family family = load_family_text(family_path);
      std::optional<fs::path> dir;
      if (!out_dir.empty()) dir = fs::path(out_dir);
      execute(name, family, sub.params(), dir, out);
      return 0;
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::ParseError:
      case ErrorKind::MalformedFamily:
      case ErrorKind::InvalidArgument:
      case ErrorKind::GridTooSmall:
        return 1;
      default:
        return 2;
    }
  } catch (const json::exception& e) {
    err << "ParseError: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "InvalidArgument: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_run(args, std::cout, std::cerr);
}

}  // namespace biflab

#include "biflab/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "biflab/errors.hpp"

namespace biflab {

namespace fs = std::filesystem;

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json json_real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(format_real(x));
}

json json_complex(cplx z) { return json::array({json_real(z.real()), json_real(z.imag())}); }

namespace {

double real_from_json(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "not a number: '" + s + "'");
  }
  if (used != s.size()) throw Error(ErrorKind::ParseError, "trailing characters in number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  const double v = parse_real(s);
  if (v != std::floor(v)) throw Error(ErrorKind::ParseError, "not an integer: '" + s + "'");
  return static_cast<int>(v);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  return out;
}

void expect_header(const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& header,
                   const fs::path& path) {
  if (rows.empty() || rows[0] != header) throw Error(ErrorKind::ParseError, "unexpected header in " + path.string());
}

json grid_to_json(const ParameterGrid& g) {
  return {{"center", json_complex(g.center)}, {"width", json_real(g.width)}, {"height", json_real(g.height)},
          {"nx", g.nx}, {"ny", g.ny}};
}

ParameterGrid grid_from_json(const json& j) {
  ParameterGrid g;
  g.center = complex_from_json(j.at("center"));
  g.width = j.at("width").get<double>();
  g.height = j.at("height").get<double>();
  g.nx = j.at("nx").get<int>();
  g.ny = j.at("ny").get<int>();
  return g;
}

}  // namespace

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::ParseError, "complex value must be [re, im]");
  return {real_from_json(j[0]), real_from_json(j[1])};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

void write_cloud_csv(const fs::path& path, const MeasureCloud& cloud) {
  auto out = open_out(path);
  out << (cloud.k == 1 ? "re,im\n" : "re1,im1,re2,im2\n");
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    CVec z;
    try {
      z = cloud.chart_point(i);
    } catch (const Error&) {
      z = CVec::Constant(cloud.k, cplx(std::numeric_limits<double>::infinity(), 0.0));
    }
    for (int c = 0; c < cloud.k; ++c)
      out << (c ? "," : "") << format_real(z[c].real()) << ',' << format_real(z[c].imag());
    out << '\n';
  }
}

std::vector<CVec> read_cloud_csv(const fs::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw Error(ErrorKind::ParseError, "empty cloud file");
  int k = 0;
  if (rows[0] == std::vector<std::string>{"re", "im"}) k = 1;
  else if (rows[0] == std::vector<std::string>{"re1", "im1", "re2", "im2"}) k = 2;
  else throw Error(ErrorKind::ParseError, "unexpected header in " + path.string());
  std::vector<CVec> pts;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != static_cast<std::size_t>(2 * k)) throw Error(ErrorKind::ParseError, "bad cloud row");
    CVec z(k);
    for (int c = 0; c < k; ++c) z[c] = cplx(parse_real(rows[r][2 * c]), parse_real(rows[r][2 * c + 1]));
    pts.push_back(z);
  }
  return pts;
}

void write_field(const fs::path& csv, const fs::path& sidecar, const LyapunovField& field) {
  const auto& g = field.grid;
  auto out = open_out(csv);
  out << "i,j,re_lambda,im_lambda,L,stderr,method\n";
  const std::string method(to_string(field.config.method));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const cplx lam = g.cell(i, j);
      const std::size_t idx = g.index(i, j);
      out << i << ',' << j << ',' << format_real(lam.real()) << ',' << format_real(lam.imag()) << ','
          << format_real(field.values[idx]) << ',' << format_real(field.std_errors[idx]) << ',' << method << '\n';
    }
  }
  json meta = {{"grid", grid_to_json(g)},
               {"method", method},
               {"tol", json_real(field.config.tol)},
               {"n_samples", field.config.n_samples},
               {"burn_in", field.config.burn_in},
               {"seed", field.config.seed},
               {"cell_seed", "seed xor splitmix64((i << 32) xor j)"},
               {"green_sup_bound", json_real(field.green_sup_bound)},
               {"failed_cells", field.failed_cells}};
  write_json(sidecar, meta);
}

LyapunovField read_field(const fs::path& csv, const fs::path& sidecar) {
  const json meta = read_json(sidecar);
  LyapunovField f;
  f.grid = grid_from_json(meta.at("grid"));
  f.config.method = lyapunov_method_from_string(meta.at("method").get<std::string>());
  f.config.tol = real_from_json(meta.at("tol"));
  f.config.n_samples = meta.at("n_samples").get<int>();
  f.config.burn_in = meta.at("burn_in").get<int>();
  f.config.seed = meta.at("seed").get<std::uint64_t>();
  f.green_sup_bound = real_from_json(meta.at("green_sup_bound"));
  f.failed_cells = meta.at("failed_cells").get<int>();
  const auto rows = read_csv(csv);
  expect_header(rows, {"i", "j", "re_lambda", "im_lambda", "L", "stderr", "method"}, csv);
  if (rows.size() != f.grid.size() + 1) throw Error(ErrorKind::ParseError, "field row count does not match its grid");
  f.values.assign(f.grid.size(), 0.0);
  f.std_errors.assign(f.grid.size(), 0.0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 7) throw Error(ErrorKind::ParseError, "bad field row");
    const int i = parse_int(rows[r][0]), j = parse_int(rows[r][1]);
    if (i < 0 || j < 0 || i >= f.grid.nx || j >= f.grid.ny) throw Error(ErrorKind::ParseError, "cell index out of range");
    f.values[f.grid.index(i, j)] = parse_real(rows[r][4]);
    f.std_errors[f.grid.index(i, j)] = parse_real(rows[r][5]);
  }
  return f;
}

void write_density(const fs::path& csv, const fs::path& sidecar, const BifurcationDensity& density) {
  const auto& g = density.grid;
  auto out = open_out(csv);
  out << "i,j,re_lambda,im_lambda,density\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const cplx lam = g.cell(i, j);
      out << i << ',' << j << ',' << format_real(lam.real()) << ',' << format_real(lam.imag()) << ','
          << format_real(density.values[g.index(i, j)]) << '\n';
    }
  }
  write_json(sidecar, {{"grid", grid_to_json(g)},
                       {"normalisation", "5-point Laplacian / (2 pi)"},
                       {"noise_floor", json_real(density.noise_floor)},
                       {"threshold", json_real(density.threshold)}});
}

BifurcationDensity read_density(const fs::path& csv, const fs::path& sidecar) {
  const json meta = read_json(sidecar);
  BifurcationDensity d;
  d.grid = grid_from_json(meta.at("grid"));
  d.noise_floor = real_from_json(meta.at("noise_floor"));
  d.threshold = real_from_json(meta.at("threshold"));
  const auto rows = read_csv(csv);
  expect_header(rows, {"i", "j", "re_lambda", "im_lambda", "density"}, csv);
  if (rows.size() != d.grid.size() + 1) throw Error(ErrorKind::ParseError, "density row count does not match its grid");
  d.values.assign(d.grid.size(), 0.0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 5) throw Error(ErrorKind::ParseError, "bad density row");
    const int i = parse_int(rows[r][0]), j = parse_int(rows[r][1]);
    if (i < 0 || j < 0 || i >= d.grid.nx || j >= d.grid.ny) throw Error(ErrorKind::ParseError, "cell index out of range");
    d.values[d.grid.index(i, j)] = parse_real(rows[r][4]);
  }
  return d;
}

void write_density_pgm(const fs::path& path, const BifurcationDensity& density) {
  const auto& g = density.grid;
  std::vector<double> finite;
  for (double v : density.values)
    if (std::isfinite(v)) finite.push_back(v);
  double top = 0.0;
  if (!finite.empty()) {
    const std::size_t k = static_cast<std::size_t>(std::floor(0.99 * static_cast<double>(finite.size() - 1)));
    std::nth_element(finite.begin(), finite.begin() + static_cast<std::ptrdiff_t>(k), finite.end());
    top = finite[k];
  }
  auto out = open_out(path);
  out << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
  std::vector<char> row(static_cast<std::size_t>(g.nx));
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) {
      const double v = density.values[g.index(i, j)];
      double level = 0.0;
      if (std::isfinite(v) && v > 0.0) level = top > 0.0 ? std::min(1.0, v / top) : 1.0;
      row[static_cast<std::size_t>(i)] = static_cast<char>(static_cast<std::uint8_t>(std::lround(255.0 * level)));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path.string());
  std::string magic;
  GrayImage img;
  int maxval = 0;
  in >> magic >> img.width >> img.height >> maxval;
  if (!in || magic != "P5" || maxval != 255 || img.width <= 0 || img.height <= 0)
    throw Error(ErrorKind::ParseError, "not an 8-bit P5 image: " + path.string());
  in.get();
  img.pixels.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height));
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw Error(ErrorKind::ParseError, "truncated image " + path.string());
  return img;
}

void write_mask_csv(const fs::path& path, const ParameterGrid& g, const std::vector<std::uint8_t>& mask) {
  auto out = open_out(path);
  out << "i,j,re_lambda,im_lambda,mask\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const cplx lam = g.cell(i, j);
      out << i << ',' << j << ',' << format_real(lam.real()) << ',' << format_real(lam.imag()) << ','
          << static_cast<int>(mask[g.index(i, j)]) << '\n';
    }
  }
}

std::vector<std::uint8_t> read_mask_csv(const fs::path& path, const ParameterGrid& g) {
  const auto rows = read_csv(path);
  expect_header(rows, {"i", "j", "re_lambda", "im_lambda", "mask"}, path);
  if (rows.size() != g.size() + 1) throw Error(ErrorKind::ParseError, "mask row count does not match its grid");
  std::vector<std::uint8_t> mask(g.size(), 0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 5) throw Error(ErrorKind::ParseError, "bad mask row");
    const int i = parse_int(rows[r][0]), j = parse_int(rows[r][1]);
    const int v = parse_int(rows[r][4]);
    if (i < 0 || j < 0 || i >= g.nx || j >= g.ny || (v != 0 && v != 1))
      throw Error(ErrorKind::ParseError, "bad mask row");
    mask[g.index(i, j)] = static_cast<std::uint8_t>(v);
  }
  return mask;
}

json hits_to_json(const std::vector<MisiurewiczHit>& hits) {
  json arr = json::array();
  for (const auto& h : hits) {
    arr.push_back({{"re", json_real(h.lambda.real())},
                   {"im", json_real(h.lambda.imag())},
                   {"n0", h.n0},
                   {"period", h.period},
                   {"residual", json_real(h.residual)},
                   {"transversality", json_real(std::abs(h.transversality))},
                   {"critical_point", json_complex(h.critical_point)},
                   {"cycle_point", json_complex(h.cycle_point)},
                   {"multiplier_modulus", json_real(h.multiplier_modulus)}});
  }
  return arr;
}

std::vector<MisiurewiczHit> hits_from_json(const json& j) {
  std::vector<MisiurewiczHit> hits;
  for (const auto& e : j) {
    MisiurewiczHit h;
    h.lambda = cplx(e.at("re").get<double>(), e.at("im").get<double>());
    h.n0 = e.at("n0").get<int>();
    h.period = e.at("period").get<int>();
    h.residual = real_from_json(e.at("residual"));
    h.transversality = real_from_json(e.at("transversality"));
    if (e.contains("critical_point")) h.critical_point = complex_from_json(e["critical_point"]);
    if (e.contains("cycle_point")) h.cycle_point = complex_from_json(e["cycle_point"]);
    if (e.contains("multiplier_modulus")) h.multiplier_modulus = real_from_json(e["multiplier_modulus"]);
    hits.push_back(h);
  }
  return hits;
}

json cycle_to_json(const Cycle& c) {
  json pts = json::array(), mults = json::array();
  for (const auto& p : c.points) {
    if (p.size() == 1) {
      pts.push_back(json_complex(p[0]));
    } else {
      json row = json::array();
      for (int i = 0; i < p.size(); ++i) row.push_back(json_complex(p[i]));
      pts.push_back(row);
    }
  }
  for (cplx w : c.multipliers) mults.push_back(json_complex(w));
  return {{"lambda", json_complex(c.lambda)},
          {"period", c.period},
          {"points", pts},
          {"multipliers", mults},
          {"class", std::string(to_string(c.classification))},
          {"residual", json_real(c.residual)}};
}

Cycle cycle_from_json(const json& j) {
  Cycle c;
  c.lambda = complex_from_json(j.at("lambda"));
  c.period = j.contains("period") ? j["period"].get<int>() : static_cast<int>(j.at("points").size());
  for (const auto& p : j.at("points")) {
    if (p.size() == 2 && !p[0].is_array()) {
      c.points.push_back(cvec(complex_from_json(p)));
    } else {
      CVec v(static_cast<int>(p.size()));
      for (std::size_t i = 0; i < p.size(); ++i) v[static_cast<int>(i)] = complex_from_json(p[i]);
      c.points.push_back(v);
    }
  }
  for (const auto& w : j.at("multipliers")) c.multipliers.push_back(complex_from_json(w));
  c.classification = cycle_class_from_string(j.at("class").get<std::string>());
  if (j.contains("residual")) c.residual = real_from_json(j["residual"]);
  return c;
}

json track_to_json(const CycleTrack& t) {
  json nodes = json::array();
  for (const auto& c : t.cycles) nodes.push_back(cycle_to_json(c));
  json out = {{"nodes", nodes},
              {"max_displacement", json_real(t.max_displacement)},
              {"max_displacement_ratio", json_real(t.max_displacement_ratio)},
              {"broken", t.broken},
              {"break_reason", t.break_reason}};
  if (t.bracket) out["bracket"] = json::array({json_complex(t.bracket->first), json_complex(t.bracket->second)});
  return out;
}

json events_to_json(const std::vector<CrossingEvent>& events) {
  json arr = json::array();
  for (const auto& e : events) {
    json rec = cycle_to_json(e.cycle);
    rec["lambda"] = json_complex(e.lambda);
    rec["multiplier_index"] = e.multiplier_index;
    rec["modulus_before"] = json_real(e.modulus_before);
    rec["modulus_after"] = json_real(e.modulus_after);
    rec["modulus_at"] = json_real(e.modulus_at);
    if (e.julia_checked) {
      rec["in_julia_before"] = e.in_julia_before;
      rec["in_julia_after"] = e.in_julia_after;
    }
    arr.push_back(rec);
  }
  return arr;
}

json motion_to_json(const MotionRecord& m) {
  json pts = json::array(), lams = json::array(), imgs = json::array();
  auto vec = [](const CVec& v) {
    json row = json::array();
    for (int i = 0; i < v.size(); ++i) row.push_back(json_complex(v[i]));
    return row;
  };
  for (const auto& p : m.points) pts.push_back(vec(p));
  for (std::size_t l = 0; l < m.lambdas.size(); ++l) {
    lams.push_back(json_complex(m.lambdas[l]));
    json row = json::array();
    for (const auto& h : m.images[l]) row.push_back(vec(h));
    imgs.push_back(row);
  }
  json steps = json::array();
  for (double s : m.step_size) steps.push_back(json_real(s));
  return {{"base", json_complex(m.base)},
          {"rho", json_real(m.rho)},
          {"points", pts},
          {"periods", m.periods},
          {"power", m.power},
          {"lambdas", lams},
          {"images", imgs},
          {"expansion", json_real(m.expansion)},
          {"tube_expansion", json_real(m.tube_expansion)},
          {"second_derivative", json_real(m.second_derivative)},
          {"parameter_derivative", json_real(m.parameter_derivative)},
          {"tau", json_real(m.tau)},
          {"delta", json_real(m.delta)},
          {"step_size", steps},
          {"max_cauchy_ratio", json_real(m.max_cauchy_ratio)},
          {"max_conjugacy_residual", json_real(m.max_conjugacy_residual)},
          {"min_separation", json_real(m.min_separation)},
          {"preserves_cycles", m.preserves_cycles}};
}

void write_contraction_csv(const fs::path& path, const ContractionReport& rep) {
  auto out = open_out(path);
  out << "n,r_p,bound,measured_lip\n";
  for (const auto& r : rep.rows)
    out << r.n << ',' << format_real(r.r_p) << ',' << format_real(r.bound) << ',' << format_real(r.measured_lip) << '\n';
}

std::vector<ContractionRow> read_contraction_csv(const fs::path& path) {
  const auto rows = read_csv(path);
  expect_header(rows, {"n", "r_p", "bound", "measured_lip"}, path);
  std::vector<ContractionRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 4) throw Error(ErrorKind::ParseError, "bad report row");
    out.push_back({parse_int(rows[r][0]), parse_real(rows[r][1]), parse_real(rows[r][2]), parse_real(rows[r][3])});
  }
  return out;
}

void write_mass_csv(const fs::path& path, const MassGrowthReport& rep) {
  auto out = open_out(path);
  out << "n,m_n\n";
  for (std::size_t i = 0; i < rep.n_list.size(); ++i) out << rep.n_list[i] << ',' << format_real(rep.m_n[i]) << '\n';
}

std::vector<std::pair<int, double>> read_mass_csv(const fs::path& path) {
  const auto rows = read_csv(path);
  expect_header(rows, {"n", "m_n"}, path);
  std::vector<std::pair<int, double>> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw Error(ErrorKind::ParseError, "bad mass row");
    out.emplace_back(parse_int(rows[r][0]), parse_real(rows[r][1]));
  }
  return out;
}

}  // namespace biflab

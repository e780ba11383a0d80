#include "biflab/family_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "biflab/errors.hpp"

namespace biflab {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + msg);
}

double parse_double(std::string_view s, int line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(line, "bad number '" + std::string(s) + "'");
  return v;
}

int parse_int(std::string_view s, int line) {
  s = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(line, "bad integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

FamilySpec parse_family(std::string_view text) {
  std::map<std::string, std::string> header;
  std::map<int, std::vector<Monomial>> coords;
  std::map<int, std::vector<std::pair<int, int>>> arity;  // (exponent count, line)
  enum class Section { none, family, coord } section = Section::none;
  int current = -1;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "unterminated section header");
      auto name = trim(line.substr(1, line.size() - 2));
      if (name == "family") {
        section = Section::family;
      } else if (name.substr(0, 5) == "coord") {
        section = Section::coord;
        current = parse_int(name.substr(5), lineno);
        if (coords.count(current)) fail(lineno, "duplicate coord section");
        coords[current];
      } else {
        fail(lineno, "unknown section '" + std::string(name) + "'");
      }
      continue;
    }
    if (section == Section::family) {
      auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(lineno, "expected key = value");
      header[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
    } else if (section == Section::coord) {
      auto colon = line.find(':');
      if (colon == std::string_view::npos) fail(lineno, "expected 'exponents : coefficients'");
      Monomial m;
      auto ex = split_ws(line.substr(0, colon));
      if (ex.empty() || ex.size() > 3) fail(lineno, "expected 2 or 3 exponents");
      for (std::size_t i = 0; i < ex.size(); ++i) m.exponents[i] = parse_int(ex[i], lineno);
      std::vector<cplx> cs;
      for (auto tok : split_ws(line.substr(colon + 1))) {
        auto comma = tok.find(',');
        if (comma == std::string_view::npos) fail(lineno, "coefficient must be re,im");
        cs.emplace_back(parse_double(tok.substr(0, comma), lineno), parse_double(tok.substr(comma + 1), lineno));
      }
      if (cs.empty()) fail(lineno, "missing coefficients");
      m.coefficient = ParamPolynomial(std::move(cs));
      arity[current].push_back({static_cast<int>(ex.size()), lineno});
      coords[current].push_back(std::move(m));
    } else {
      fail(lineno, "content outside a section");
    }
  }
  for (const char* key : {"k", "d"})
    if (!header.count(key)) throw Error(ErrorKind::ParseError, std::string("missing key '") + key + "' in [family]");
  const int k = parse_int(header["k"], 0);
  const int d = parse_int(header["d"], 0);
  const FamilyKind kind = header.count("kind") ? family_kind_from_string(header["kind"]) : FamilyKind::generic;
  for (const auto& [c, list] : arity)
    for (const auto& [count, line] : list)
      if (count != k + 1) fail(line, "exponent count must be k+1");
  std::vector<std::vector<Monomial>> forms;
  for (int c = 0; c <= k; ++c) {
    auto it = coords.find(c);
    if (it == coords.end()) throw Error(ErrorKind::MalformedFamily, "missing [coord " + std::to_string(c) + "]");
    forms.push_back(it->second);
  }
  if (static_cast<int>(coords.size()) != k + 1) throw Error(ErrorKind::MalformedFamily, "unexpected coord sections");
  return FamilySpec(k, d, kind, std::move(forms), header.count("label") ? header["label"] : "");
}

FamilySpec load_family(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open family file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_family(ss.str());
}

std::string format_family(const FamilySpec& spec) {
  std::ostringstream os;
  os << "[family]\n"
     << "k = " << spec.k() << "\n"
     << "d = " << spec.d() << "\n"
     << "kind = " << to_string(spec.kind()) << "\n";
  if (!spec.label().empty()) os << "label = " << spec.label() << "\n";
  char buf[64];
  for (int c = 0; c <= spec.k(); ++c) {
    os << "\n[coord " << c << "]\n";
    for (const auto& m : spec.coord(c)) {
      for (int i = 0; i <= spec.k(); ++i) os << (i ? " " : "") << m.exponents[static_cast<std::size_t>(i)];
      os << " :";
      auto cs = m.coefficient.coefficients();
      if (cs.empty()) os << " 0,0";
      for (auto v : cs) {
        std::snprintf(buf, sizeof buf, " %.17g,%.17g", v.real(), v.imag());
        os << buf;
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace biflab

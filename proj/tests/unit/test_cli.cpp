#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "biflab/cli.hpp"
#include "biflab/export.hpp"
#include "biflab/family_io.hpp"

using namespace biflab;
namespace fs = std::filesystem;

namespace {

std::string fam(const std::string& name) { return std::string(BIFLAB_FAMILY_DIR) + "/" + name + ".fam"; }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("biflab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("number formatting") {
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(std::log(2.0)) == "0.69314718056");
    CHECK(format_real(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_real(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(json_real(std::numeric_limits<double>::quiet_NaN()).is_null());
    CHECK(json_real(1.0 / 3.0).get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    const cplx z{1.25, -3.5};
    CHECK(complex_from_json(json_complex(z)) == z);
  }

  TEST_CASE("contraction and mass csv round trip") {
    const fs::path dir = scratch("csv");
    fs::create_directories(dir);
    ContractionReport rep;
    rep.rows = {{1, 4.0, 0.55, 0.5}, {2, 4.0, 0.3, 0.25}};
    write_contraction_csv(dir / "report.csv", rep);
    const auto rows = read_contraction_csv(dir / "report.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].n == 2);
    CHECK(rows[1].measured_lip == 0.25);
    CHECK(rows[0].bound == 0.55);

    MassGrowthReport mass;
    mass.n_list = {1, 2, 3};
    mass.m_n = {0.5, 0.25, 0.125};
    write_mass_csv(dir / "mass.csv", mass);
    const auto back = read_mass_csv(dir / "mass.csv");
    REQUIRE(back.size() == 3);
    CHECK(back[2].first == 3);
    CHECK(back[2].second == 0.125);
    fs::remove_all(dir);
  }

  TEST_CASE("misiurewicz hits json round trip") {
    MisiurewiczHit h;
    h.lambda = {0.0, 1.0};
    h.n0 = 1;
    h.period = 2;
    h.residual = 1e-13;
    h.transversality = {3.0, 4.0};
    h.multiplier_modulus = 4.0 * std::sqrt(2.0);
    const auto back = hits_from_json(hits_to_json({h}));
    REQUIRE(back.size() == 1);
    CHECK(back[0].lambda == h.lambda);
    CHECK(back[0].n0 == 1);
    CHECK(back[0].period == 2);
    CHECK(std::abs(back[0].transversality) == doctest::Approx(5.0));
    CHECK(back[0].multiplier_modulus == doctest::Approx(h.multiplier_modulus).epsilon(1e-11));
  }

  TEST_CASE("cycle json round trip") {
    const auto spec = load_family(fam("quad"));
    const auto e = find_cycles(spec, -1.0, 2);
    REQUIRE(e.cycles.size() == 1);
    const Cycle c = cycle_from_json(cycle_to_json(e.cycles[0]));
    CHECK(c.period == 2);
    CHECK(c.classification == e.cycles[0].classification);
    REQUIRE(c.points.size() == 2);
    CHECK(std::abs(c.points[0][0] - e.cycles[0].points[0][0]) <= 1e-11);
  }

  TEST_CASE("point commands print their values") {
    auto r = run({"green", "--family", fam("quad"), "--lambda", "0,0", "--z", "0,0"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("g=0 ", 0) == 0);

    r = run({"green", "--family", fam("z2"), "--z", "2,0"});
    CHECK(r.code == 0);
    CHECK(r.out.find("escape_rate=0.69314718056") != std::string::npos);

    r = run({"lyap", "--family", fam("z2"), "--lambda", "0,0"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("L=0.69314718056", 0) == 0);
    CHECK(r.out.find("method=przytycki") != std::string::npos);

    r = run({"cycles", "--family", fam("quad"), "--lambda", "-1,0", "--period", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("cycles=1 complete=true") != std::string::npos);
  }

  TEST_CASE("exit codes") {
    auto r = run({"lyap", "--family", fam("z2"), "--lambda", "zero"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--lambda") != std::string::npos);

    r = run({"lyap", "--family", fam("no_such_family")});
    CHECK(r.code == 1);

    r = run({"frobnicate"});
    CHECK(r.code == 1);

    r = run({"lyap-map", "--family", fam("quad")});
    CHECK(r.code == 1);
    CHECK(r.err.find("--out") != std::string::npos);

    r = run({"motion", "--family", fam("z2"), "--lambda", "0,0", "--point", "1,0"});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("ExpansionHypothesisFailed: ", 0) == 0);

    r = run({"selftest"});
    CHECK(r.code == 0);
  }

  TEST_CASE("bif-map files parse back and replay is byte-identical") {
    const fs::path dir = scratch("bif");
    const fs::path again = scratch("bif_replay");
    const auto r = run({"bif-map", "--family", fam("quad"), "--center", "-0.5,0", "--width", "3", "--height", "3",
                        "--nx", "24", "--ny", "24", "--out", dir.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    for (const char* f : {"L.csv", "L.json", "density.csv", "density.json", "density.pgm", "mask.csv", "manifest.json"})
      CHECK_MESSAGE(fs::exists(dir / f), f);

    const auto field = read_field(dir / "L.csv", dir / "L.json");
    CHECK(field.grid.nx == 24);
    CHECK(field.values.size() == 576);
    const auto density = read_density(dir / "density.csv", dir / "density.json");
    CHECK(density.threshold == doctest::Approx(5.0 * density.noise_floor));
    CHECK(std::isnan(density.values[0]));
    const auto img = read_pgm(dir / "density.pgm");
    CHECK(img.width == 24);
    CHECK(img.height == 24);
    const auto mask = read_mask_csv(dir / "mask.csv", density.grid);
    CHECK(mask == support_mask(density));

    const auto manifest = read_json(dir / "manifest.json");
    CHECK(manifest["command"] == "bif-map");
    CHECK(manifest["version"] == "1.0.0");
    CHECK(manifest["family"]["text"].get<std::string>().find("[family]") != std::string::npos);

    const auto rr = run({"replay", "--manifest", (dir / "manifest.json").string(), "--out", again.string()});
    REQUIRE_MESSAGE(rr.code == 0, rr.err);
    CHECK(rr.out == r.out);
    for (const auto& entry : fs::directory_iterator(dir))
      CHECK_MESSAGE(slurp(entry.path()) == slurp(again / entry.path().filename()), entry.path().filename().string());
    fs::remove_all(dir);
    fs::remove_all(again);
  }
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "biflab/bifurcation.hpp"
#include "biflab/contraction.hpp"
#include "biflab/cycles.hpp"
#include "biflab/lyapunov.hpp"
#include "biflab/motion.hpp"
#include "biflab/sampler.hpp"

namespace biflab {

using json = nlohmann::ordered_json;

/// Text of x with 12 significant digits ("nan", "inf", "-inf" for non-finite).
std::string format_real(double x);
/// x rounded to 12 significant digits; non-finite values become JSON null.
json json_real(double x);
json json_complex(cplx z);
cplx complex_from_json(const json& j);

/// "re,im" (k = 1) or "re1,im1,re2,im2" (k = 2) rows in the standard chart.
void write_cloud_csv(const std::filesystem::path& path, const MeasureCloud& cloud);
std::vector<CVec> read_cloud_csv(const std::filesystem::path& path);

/// "i,j,re_lambda,im_lambda,L,stderr,method" plus a JSON sidecar holding the
/// grid and the sweep configuration.
void write_field(const std::filesystem::path& csv, const std::filesystem::path& sidecar, const LyapunovField& field);
LyapunovField read_field(const std::filesystem::path& csv, const std::filesystem::path& sidecar);

/// "i,j,re_lambda,im_lambda,density" plus a JSON sidecar with the grid,
/// noise floor and threshold.
void write_density(const std::filesystem::path& csv, const std::filesystem::path& sidecar,
                   const BifurcationDensity& density);
BifurcationDensity read_density(const std::filesystem::path& csv, const std::filesystem::path& sidecar);

/// 8-bit binary PGM; the top row is the largest imaginary part, grey level
/// ramps linearly from density 0 to the 99th percentile of finite values.
void write_density_pgm(const std::filesystem::path& path, const BifurcationDensity& density);
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, top row first
};
GrayImage read_pgm(const std::filesystem::path& path);

/// "i,j,re_lambda,im_lambda,mask".
void write_mask_csv(const std::filesystem::path& path, const ParameterGrid& grid, const std::vector<std::uint8_t>& mask);
std::vector<std::uint8_t> read_mask_csv(const std::filesystem::path& path, const ParameterGrid& grid);

json hits_to_json(const std::vector<MisiurewiczHit>& hits);
std::vector<MisiurewiczHit> hits_from_json(const json& j);

json cycle_to_json(const Cycle& c);
Cycle cycle_from_json(const json& j);
/// Array of per-node cycle records.
json track_to_json(const CycleTrack& t);
json events_to_json(const std::vector<CrossingEvent>& events);

json motion_to_json(const MotionRecord& m);

/// "n,r_p,bound,measured_lip".
void write_contraction_csv(const std::filesystem::path& path, const ContractionReport& rep);
std::vector<ContractionRow> read_contraction_csv(const std::filesystem::path& path);

/// "n,m_n".
void write_mass_csv(const std::filesystem::path& path, const MassGrowthReport& rep);
std::vector<std::pair<int, double>> read_mass_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

/// Rows of a CSV file split on commas, header first.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace biflab

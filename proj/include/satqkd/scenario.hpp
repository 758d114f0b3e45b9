// Scenario configuration: an INI file with [geometry], [channel], [counts],
// [finitekey], [sweep] and [annual] sections. Missing keys take the
// reference defaults; unknown keys are errors.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "satqkd/channel.hpp"
#include "satqkd/counts.hpp"
#include "satqkd/finitekey.hpp"
#include "satqkd/geometry.hpp"

namespace satqkd {

/// Axes of a Cartesian sweep. An empty axis means "the scenario value".
/// xi_deg and offset_m are alternatives; at most one may be set.
struct SweepAxes {
  std::vector<double> altitude_m;
  std::vector<double> separation_m;
  std::vector<double> phi_deg;
  std::vector<double> xi_deg;
  std::vector<double> offset_m;
  std::vector<double> background_scale;

  std::vector<std::string> violations() const;
  bool operator==(const SweepAxes&) const = default;
};

struct GammaRange {
  double lo_deg = 0.0;
  double hi_deg = 360.0;
  bool operator==(const GammaRange&) const = default;
};

struct AnnualConfig {
  /// Samples over gamma in [0, 180] deg, both ends included.
  int gamma_samples = 181;
  /// Sample [0, 90] only and mirror; exact when SKL(gamma) = SKL(180 - gamma).
  bool symmetry = true;
  /// Allowed gamma ranges on the full circle, degrees. Empty admits all.
  std::vector<GammaRange> gamma_mask;

  std::vector<std::string> violations() const;
  bool operator==(const AnnualConfig&) const = default;
};

struct Scenario {
  OverpassGeometry geometry;
  OpticalSystem optics;
  DetectorModel detector;
  SourceModel source;
  SecurityConfig security;

  /// Resolved file paths; empty selects the built-in table.
  std::string atmosphere_table_path;
  std::string atmosphere_table_path_b;  // empty: same as site A
  std::string radiance_table_path_a;
  std::string radiance_table_path_b;
  /// Constant radiance (W cm^-2 sr^-1 nm^-1) used when no table is given;
  /// negative selects the default night value.
  double radiance_a = -1.0;
  double radiance_b = -1.0;

  SweepAxes sweep;
  AnnualConfig annual;

  std::vector<std::string> violations() const;
  bool operator==(const Scenario&) const = default;
};

/// Tables referenced by a scenario, loaded and ready for use.
struct ScenarioData {
  AtmosphereTable atm_a;
  AtmosphereTable atm_b;
  SiteBackground sky;
};

ScenarioData load_data(const Scenario& sc);

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct ParsedScenario {
  Scenario scenario;
  /// One line per key that fell back to its default.
  std::vector<std::string> notices;
};

/// `overrides` are "section.key=value" strings applied on top of the file.
/// Relative data paths are looked up in the working directory, the config
/// file's directory, $SATQKD_DATA_DIR and the installed data directory, in
/// that order. Throws ScenarioError listing every problem found.
ParsedScenario parse_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
ParsedScenario parse_scenario_text(const std::string& text, const std::filesystem::path& base_dir,
                                   const std::vector<std::string>& overrides = {},
                                   const std::string& source_name = "<config>");

/// Every key, one per line, in a form parse_scenario reads back unchanged.
std::string emit_scenario(const Scenario& sc);

/// Search order for relative data paths; empty when nothing matches.
std::filesystem::path resolve_data_path(const std::string& name, const std::filesystem::path& base_dir);

/// Directory holding the bundled tables.
std::filesystem::path default_data_dir();

}  // namespace satqkd

#include "satqkd/scenario.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "satqkd/csv.hpp"

#ifndef SATQKD_DEFAULT_DATA_DIR
#define SATQKD_DEFAULT_DATA_DIR "data"
#endif

namespace satqkd {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

std::vector<std::string> SweepAxes::violations() const {
  std::vector<std::string> out;
  if (!xi_deg.empty() && !offset_m.empty()) out.push_back("sweep.xi_deg and sweep.offset_m are alternatives; set only one");
  for (double v : altitude_m)
    if (!(v > 0.0)) out.push_back(fmt::format("sweep.altitude_m entries must be > 0 (got {})", v));
  for (double v : separation_m)
    if (!(v >= 0.0)) out.push_back(fmt::format("sweep.ogs_separation_m entries must be >= 0 (got {})", v));
  for (double v : offset_m)
    if (!(v >= 0.0)) out.push_back(fmt::format("sweep.offset_m entries must be >= 0 (got {})", v));
  for (double v : background_scale)
    if (!(v >= 0.0)) out.push_back(fmt::format("sweep.background_scale entries must be >= 0 (got {})", v));
  return out;
}

std::vector<std::string> AnnualConfig::violations() const {
  std::vector<std::string> out;
  if (gamma_samples < 3 || gamma_samples % 2 == 0)
    out.push_back(fmt::format("annual.gamma_samples must be odd and >= 3 (got {})", gamma_samples));
  for (const auto& r : gamma_mask)
    if (!(r.lo_deg >= 0.0 && r.hi_deg <= 360.0 && r.lo_deg <= r.hi_deg))
      out.push_back(fmt::format("annual.gamma_mask_deg range {}:{} must satisfy 0 <= lo <= hi <= 360", r.lo_deg, r.hi_deg));
  return out;
}

std::vector<std::string> Scenario::violations() const {
  std::vector<std::string> out;
  auto add = [&](const std::vector<std::string>& v) { out.insert(out.end(), v.begin(), v.end()); };
  add(geometry.violations());
  add(optics.violations());
  add(detector.violations());
  add(source.violations());
  add(security.violations());
  add(sweep.violations());
  add(annual.violations());
  return out;
}

ScenarioData load_data(const Scenario& sc) {
  AtmosphereTable atm_a =
      sc.atmosphere_table_path.empty() ? AtmosphereTable::default_785nm() : AtmosphereTable::load_csv(sc.atmosphere_table_path);
  AtmosphereTable atm_b =
      sc.atmosphere_table_path_b.empty() ? atm_a : AtmosphereTable::load_csv(sc.atmosphere_table_path_b);
  auto radiance = [](const std::string& path, double value) {
    if (!path.empty()) return Radiance::load_csv(path);
    return Radiance(value >= 0.0 ? value : default_night_radiance());
  };
  return ScenarioData{std::move(atm_a), std::move(atm_b),
                      SiteBackground{radiance(sc.radiance_table_path_a, sc.radiance_a),
                                     radiance(sc.radiance_table_path_b, sc.radiance_b)}};
}

namespace {

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error("invalid scenario:\n  " + join(problems, "\n  ")), problems_(std::move(problems)) {}

fs::path default_data_dir() { return fs::path(SATQKD_DEFAULT_DATA_DIR); }

fs::path resolve_data_path(const std::string& name, const fs::path& base_dir) {
  const fs::path p(name);
  std::error_code ec;
  if (p.is_absolute()) return fs::exists(p, ec) ? p : fs::path{};
  std::vector<fs::path> roots{fs::current_path(ec), base_dir};
  if (const char* env = std::getenv("SATQKD_DATA_DIR"); env && *env) roots.emplace_back(env);
  roots.push_back(default_data_dir());
  for (const auto& root : roots) {
    if (root.empty()) continue;
    const fs::path candidate = root / p;
    if (fs::is_regular_file(candidate, ec)) return fs::weakly_canonical(candidate, ec);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Key table

namespace {

double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) throw std::invalid_argument("expected a number, got '" + text + "'");
  return v;
}

int parse_int(const std::string& text) {
  const double v = parse_double(text);
  if (v != static_cast<double>(static_cast<int>(v))) throw std::invalid_argument("expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& text) {
  static const std::set<std::string> yes{"true", "1", "yes", "on"}, no{"false", "0", "no", "off"};
  if (yes.count(text)) return true;
  if (no.count(text)) return false;
  throw std::invalid_argument("expected true or false, got '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("empty list entry in '" + text + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const auto& s : split(text, ',')) out.push_back(parse_double(s));
  return out;
}

std::vector<GammaRange> parse_mask(const std::string& text) {
  std::vector<GammaRange> out;
  if (text.empty()) return out;
  for (const auto& s : split(text, ',')) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw std::invalid_argument("gamma ranges are written lo:hi, got '" + s + "'");
    out.push_back({parse_double(parts[0]), parse_double(parts[1])});
  }
  return out;
}

std::string emit_list(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double x : v) s.push_back(format_number(x));
  return join(s, ",");
}

std::string emit_mask(const std::vector<GammaRange>& v) {
  std::vector<std::string> s;
  for (const auto& r : v) s.push_back(format_number(r.lo_deg) + ":" + format_number(r.hi_deg));
  return join(s, ",");
}

// Shortest text t with parse(t) / scale == value, so nm <-> m round-trips.
std::string emit_scaled(double value, double scale) {
  const double v = value * scale;
  for (int p = 1; p <= 17; ++p) {
    const std::string s = fmt::format("{:.{}g}", v, p);
    if (parse_double(s) / scale == value) return s;
  }
  return format_number(v);
}

struct Key {
  std::string section;
  std::string name;
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

#define SATQKD_NUM_KEY(SEC, NAME, FIELD)                                                    \
  Key {                                                                                     \
    SEC, NAME, [](Scenario& s, const std::string& v) { s.FIELD = parse_double(v); },        \
        [](const Scenario& s) { return format_number(s.FIELD); }                            \
  }
#define SATQKD_INT_KEY(SEC, NAME, FIELD)                                                    \
  Key {                                                                                     \
    SEC, NAME, [](Scenario& s, const std::string& v) { s.FIELD = parse_int(v); },           \
        [](const Scenario& s) { return std::to_string(s.FIELD); }                           \
  }
#define SATQKD_BOOL_KEY(SEC, NAME, FIELD)                                                   \
  Key {                                                                                     \
    SEC, NAME, [](Scenario& s, const std::string& v) { s.FIELD = parse_bool(v); },          \
        [](const Scenario& s) { return std::string(s.FIELD ? "true" : "false"); }           \
  }
#define SATQKD_STR_KEY(SEC, NAME, FIELD)                                                    \
  Key {                                                                                     \
    SEC, NAME, [](Scenario& s, const std::string& v) { s.FIELD = v; },                      \
        [](const Scenario& s) { return s.FIELD; }                                           \
  }
#define SATQKD_LIST_KEY(SEC, NAME, FIELD)                                                   \
  Key {                                                                                     \
    SEC, NAME, [](Scenario& s, const std::string& v) { s.FIELD = parse_list(v); },          \
        [](const Scenario& s) { return emit_list(s.FIELD); }                                \
  }

const std::vector<Key>& key_table() {
  static const std::vector<Key> keys{
      SATQKD_NUM_KEY("geometry", "altitude_m", geometry.altitude_m),
      SATQKD_NUM_KEY("geometry", "ogs_separation_m", geometry.separation_m),
      SATQKD_NUM_KEY("geometry", "phi_deg", geometry.phi_deg),
      SATQKD_NUM_KEY("geometry", "xi_deg", geometry.xi_deg),
      SATQKD_NUM_KEY("geometry", "theta_min_deg", geometry.theta_min_deg),
      SATQKD_NUM_KEY("geometry", "bin_width_s", geometry.bin_width_s),
      Key{"geometry", "elevation_model",
          [](Scenario& s, const std::string& v) { s.geometry.elevation_model = parse_elevation_model(v); },
          [](const Scenario& s) { return to_string(s.geometry.elevation_model); }},

      Key{"channel", "wavelength_a_nm", [](Scenario& s, const std::string& v) { s.optics.wavelength_a_m = parse_double(v) / 1e9; },
          [](const Scenario& s) { return emit_scaled(s.optics.wavelength_a_m, 1e9); }},
      Key{"channel", "wavelength_b_nm", [](Scenario& s, const std::string& v) { s.optics.wavelength_b_m = parse_double(v) / 1e9; },
          [](const Scenario& s) { return emit_scaled(s.optics.wavelength_b_m, 1e9); }},
      SATQKD_NUM_KEY("channel", "tx_diameter_m", optics.tx_diameter_m),
      SATQKD_NUM_KEY("channel", "rx_diameter_m", optics.rx_diameter_m),
      SATQKD_NUM_KEY("channel", "beam_waist_m", optics.beam_waist_m),
      SATQKD_NUM_KEY("channel", "intrinsic_loss_db", optics.intrinsic_loss_db),
      Key{"channel", "aperture_convention",
          [](Scenario& s, const std::string& v) { s.optics.aperture_convention = parse_aperture_convention(v); },
          [](const Scenario& s) { return to_string(s.optics.aperture_convention); }},
      SATQKD_BOOL_KEY("channel", "enable_diffraction", optics.diffraction_enabled),
      SATQKD_BOOL_KEY("channel", "enable_atmosphere", optics.atmosphere_enabled),
      SATQKD_STR_KEY("channel", "atmosphere_table_path", atmosphere_table_path),
      SATQKD_STR_KEY("channel", "atmosphere_table_path_b", atmosphere_table_path_b),

      SATQKD_NUM_KEY("counts", "pair_rate_hz", source.pair_rate_hz),
      SATQKD_NUM_KEY("counts", "qber_intrinsic", source.qber_intrinsic),
      SATQKD_NUM_KEY("counts", "squeezing", source.squeezing),
      SATQKD_NUM_KEY("counts", "p_dark", detector.p_dark),
      SATQKD_NUM_KEY("counts", "p_afterpulse", detector.p_afterpulse),
      SATQKD_NUM_KEY("counts", "coincidence_window_s", detector.coincidence_window_s),
      SATQKD_NUM_KEY("counts", "fov_sr", detector.fov_sr),
      SATQKD_NUM_KEY("counts", "filter_bandwidth_nm", detector.filter_bandwidth_nm),
      SATQKD_NUM_KEY("counts", "background_scale", detector.background_scale),
      SATQKD_STR_KEY("counts", "radiance_table_path_a", radiance_table_path_a),
      SATQKD_STR_KEY("counts", "radiance_table_path_b", radiance_table_path_b),
      SATQKD_NUM_KEY("counts", "radiance_a", radiance_a),
      SATQKD_NUM_KEY("counts", "radiance_b", radiance_b),

      SATQKD_INT_KEY("finitekey", "security_s", security.s),
      SATQKD_INT_KEY("finitekey", "grid_n", security.grid_n),
      SATQKD_INT_KEY("finitekey", "n_thresholds", security.n_thresholds),
      Key{"finitekey", "threshold_model",
          [](Scenario& s, const std::string& v) { s.security.threshold_model = parse_threshold_model(v); },
          [](const Scenario& s) { return to_string(s.security.threshold_model); }},
      SATQKD_NUM_KEY("finitekey", "ec_efficiency", security.ec_efficiency),
      SATQKD_NUM_KEY("finitekey", "beta_min", security.beta_min),

      SATQKD_LIST_KEY("sweep", "altitude_m", sweep.altitude_m),
      SATQKD_LIST_KEY("sweep", "ogs_separation_m", sweep.separation_m),
      SATQKD_LIST_KEY("sweep", "phi_deg", sweep.phi_deg),
      SATQKD_LIST_KEY("sweep", "xi_deg", sweep.xi_deg),
      SATQKD_LIST_KEY("sweep", "offset_m", sweep.offset_m),
      SATQKD_LIST_KEY("sweep", "background_scale", sweep.background_scale),

      SATQKD_INT_KEY("annual", "gamma_samples", annual.gamma_samples),
      SATQKD_BOOL_KEY("annual", "symmetry", annual.symmetry),
      Key{"annual", "gamma_mask_deg", [](Scenario& s, const std::string& v) { s.annual.gamma_mask = parse_mask(v); },
          [](const Scenario& s) { return emit_mask(s.annual.gamma_mask); }},
  };
  return keys;
}

#undef SATQKD_NUM_KEY
#undef SATQKD_INT_KEY
#undef SATQKD_BOOL_KEY
#undef SATQKD_STR_KEY
#undef SATQKD_LIST_KEY

const char* const kSections[] = {"geometry", "channel", "counts", "finitekey", "sweep", "annual"};

// Line of each "section.key" in the source text, for error context.
std::map<std::string, int> key_lines(const std::string& text) {
  std::map<std::string, int> out;
  std::istringstream in(text);
  std::string line, section;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == ';' || line[b] == '#') continue;
    if (line[b] == '[') {
      const auto e = line.find(']', b);
      section = line.substr(b + 1, e == std::string::npos ? std::string::npos : e - b - 1);
      continue;
    }
    const auto eq = line.find('=', b);
    if (eq == std::string::npos) continue;
    std::string key = line.substr(b, eq - b);
    key.erase(key.find_last_not_of(" \t") + 1);
    out.emplace(section + "." + key, n);
  }
  return out;
}

}  // namespace

ParsedScenario parse_scenario_text(const std::string& text, const fs::path& base_dir,
                                   const std::vector<std::string>& overrides, const std::string& source_name) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ScenarioError({fmt::format("{}:{}: {}", source_name, e.line(), e.message())});
  }

  std::vector<std::string> problems;
  const auto lines = key_lines(text);
  auto where = [&](const std::string& dotted) {
    const auto it = lines.find(dotted);
    return it == lines.end() ? source_name : fmt::format("{}:{}", source_name, it->second);
  };

  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    const auto dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      problems.push_back("--set expects section.key=value, got '" + ov + "'");
      continue;
    }
    tree.put(pt::ptree::path_type(ov.substr(0, eq), '.'), ov.substr(eq + 1));
  }

  std::set<std::string> known_sections(std::begin(kSections), std::end(kSections));
  std::set<std::string> known;
  for (const auto& k : key_table()) known.insert(k.section + "." + k.name);
  for (const auto& [section, body] : tree) {
    if (!known_sections.count(section)) {
      problems.push_back(body.empty() && !body.data().empty() ? fmt::format("{}: key '{}' outside any section", where("." + section), section)
                                      : fmt::format("{}: unknown section [{}]", source_name, section));
      continue;
    }
    for (const auto& [key, value] : body)
      if (!known.count(section + "." + key)) problems.push_back(fmt::format("{}: unknown key '{}' in [{}]", where(section + "." + key), key, section));
  }

  ParsedScenario out;
  Scenario& sc = out.scenario;
  bool waist_given = false;
  for (const auto& k : key_table()) {
    const std::string dotted = k.section + "." + k.name;
    const auto value = tree.get_optional<std::string>(pt::ptree::path_type(dotted, '.'));
    if (!value) {
      if (k.section != "sweep" && k.section != "annual")
        out.notices.push_back(fmt::format("{} not set; default {}", dotted, k.get(sc).empty() ? "(built-in)" : k.get(sc)));
      continue;
    }
    if (dotted == "channel.beam_waist_m") waist_given = true;
    try {
      k.set(sc, *value);
    } catch (const std::exception& e) {
      problems.push_back(fmt::format("{}: {}: {}", where(dotted), dotted, e.what()));
    }
  }
  if (!waist_given) sc.optics.beam_waist_m = 0.5 * sc.optics.tx_diameter_m;

  for (std::string* path : {&sc.atmosphere_table_path, &sc.atmosphere_table_path_b, &sc.radiance_table_path_a,
                            &sc.radiance_table_path_b}) {
    if (path->empty()) continue;
    const fs::path found = resolve_data_path(*path, base_dir);
    if (found.empty()) {
      problems.push_back(fmt::format("data file '{}' not found (searched working directory, {}, $SATQKD_DATA_DIR, {})", *path,
                                     base_dir.string(), default_data_dir().string()));
    } else {
      *path = found.string();
    }
  }

  for (const auto& v : sc.violations()) problems.push_back(v);
  if (problems.empty()) {
    try {
      (void)load_data(sc);
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) throw ScenarioError(std::move(problems));
  return out;
}

ParsedScenario parse_scenario(const fs::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({"cannot read config file '" + path.string() + "'"});
  std::stringstream buf;
  buf << in.rdbuf();
  fs::path dir = path.parent_path();
  if (dir.empty()) dir = fs::current_path();
  return parse_scenario_text(buf.str(), dir, overrides, path.string());
}

std::string emit_scenario(const Scenario& sc) {
  std::string out;
  std::string section;
  for (const auto& k : key_table()) {
    if (k.section != section) {
      out += (section.empty() ? "[" : "\n[") + k.section + "]\n";
      section = k.section;
    }
    out += k.name + " = " + k.get(sc) + "\n";
  }
  return out;
}

}  // namespace satqkd

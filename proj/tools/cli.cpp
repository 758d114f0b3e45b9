#include "cli.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "satqkd/csv.hpp"
#include "satqkd/mission.hpp"
#include "satqkd/parallel.hpp"

namespace satqkd::cli {

namespace {

using Row = std::vector<std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;
  std::vector<std::string> notes;  // comment lines that are part of the data
  nlohmann::json summary = nlohmann::json::object();
};

std::string num(double x) { return format_number(x); }
std::string num(std::int64_t x) { return std::to_string(x); }

// FNV-1a; std::hash is not stable across library builds.
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const std::vector<std::string> kResultColumns{"delta", "m_bits", "qber", "ell_bits", "beta", "nu", "xi",
                                              "k_bits", "n_bits", "eps_pe", "eps_pa"};

Row result_fields(const SklResult& r) {
  return {num(r.delta), num(r.m),    num(r.qber), num(r.ell),    num(r.beta),  num(r.nu),
          num(r.xi),    num(r.k),    num(r.n),    num(r.eps_pe), num(r.eps_pa)};
}

nlohmann::json result_json(const SklResult& r) {
  return {{"ell_bits", r.ell}, {"m_bits", r.m},   {"delta", r.delta}, {"qber", r.qber},    {"beta", r.beta},
          {"nu", r.nu},        {"xi", r.xi},      {"k_bits", r.k},    {"n_bits", r.n},     {"eps_pe", r.eps_pe},
          {"eps_pa", r.eps_pa}, {"feasible", r.feasible}};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string clean(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

// ---------------------------------------------------------------------------

Table loss_profile(const Scenario& sc, const ScenarioData& data) {
  const LinkProfile link = sample_overpass(sc.geometry);
  const Channel channel(sc.optics, data.atm_a, data.atm_b);
  const LossProfile loss = channel.link_efficiency(link);
  Table t;
  t.header = {"time_s",      "range_a_m",   "range_b_m",     "elev_a_deg", "elev_b_deg",
              "loss_a_db",   "loss_b_db",   "loss_total_db", "visible"};
  for (std::size_t i = 0; i < link.size(); ++i) {
    if (link.elev_a_deg[i] < 0.0 && link.elev_b_deg[i] < 0.0) continue;
    t.rows.push_back({num(link.times_s[i]), num(link.range_a_m[i]), num(link.range_b_m[i]), num(link.elev_a_deg[i]),
                      num(link.elev_b_deg[i]), num(loss.loss_a_db[i]), num(loss.loss_b_db[i]),
                      num(loss.loss_a_db[i] + loss.loss_b_db[i]), link.visible[i] ? "1" : "0"});
  }
  t.summary["visible_s"] = link.visible_duration_s();
  t.summary["min_combined_loss_db"] = loss.min_combined_loss_db();
  return t;
}

Table pass(const Scenario& sc, const ScenarioData& data) {
  const PassResult p = simulate_pass(sc, data);
  Table t;
  t.header = concat({"altitude_m", "ogs_separation_m", "phi_deg", "xi_deg", "visible_s", "min_loss_db"}, kResultColumns);
  t.rows.push_back(concat({num(sc.geometry.altitude_m), num(sc.geometry.separation_m), num(sc.geometry.phi_deg),
                           num(sc.geometry.xi_deg), num(p.link.visible_duration_s()), num(p.loss.min_combined_loss_db())},
                          result_fields(p.sweep.best)));
  t.summary["best"] = result_json(p.sweep.best);
  return t;
}

Table block_sweep(const Scenario& sc, const ScenarioData& data, const std::vector<double>& scales) {
  Table t;
  t.header = concat({"background_scale"}, kResultColumns);
  const Channel channel(sc.optics, data.atm_a, data.atm_b);
  for (double f : scales.empty() ? std::vector<double>{sc.detector.background_scale} : scales) {
    Scenario cell = sc;
    cell.detector.background_scale = f;
    const PassResult p = simulate_pass(cell, data, channel);
    for (const auto& r : p.sweep.curve) t.rows.push_back(concat({num(f)}, result_fields(r)));
    t.summary["best"].push_back({{"background_scale", f}, {"result", result_json(p.sweep.best)}});
  }
  return t;
}

Table sweep(const Scenario& sc, const ScenarioData& data, const SweepAxes& axes) {
  const auto cells = run_sweep(sc, data, axes);
  Table t;
  t.header = concat(concat({"altitude_m", "ogs_separation_m", "phi_deg", "xi_deg", "offset_m", "background_scale",
                            "visible_s", "min_loss_db"},
                           kResultColumns),
                    {"error"});
  int failed = 0;
  for (const auto& c : cells) {
    Row row{num(c.altitude_m),
            num(c.separation_m),
            num(c.phi_deg),
            num(c.xi_deg),
            c.offset_m ? num(*c.offset_m) : "",
            num(c.background_scale),
            num(c.visible_s),
            num(c.min_loss_db)};
    row = concat(row, result_fields(c.result));
    row.push_back(clean(c.error));
    failed += c.error.empty() ? 0 : 1;
    t.rows.push_back(std::move(row));
  }
  t.summary["cells"] = cells.size();
  t.summary["failed_cells"] = failed;
  return t;
}

Table annual(const Scenario& sc, const ScenarioData& data, const AnnualConfig& cfg) {
  const AnnualResult a = annual_skl(sc, data, cfg);
  Table t;
  t.header = {"gamma_deg", "skl_bits"};
  for (std::size_t i = 0; i < a.gamma_deg.size(); ++i) t.rows.push_back({num(a.gamma_deg[i]), num(a.skl_bits[i])});
  t.notes.push_back(fmt::format("skl_year_bits = {}", num(a.skl_year_bits)));
  t.notes.push_back(fmt::format("orbits_per_year = {}", num(a.orbits_per_year)));
  t.summary["skl_year_bits"] = a.skl_year_bits;
  t.summary["orbits_per_year"] = a.orbits_per_year;
  return t;
}

std::string utc_now() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual-downlink entanglement QKD pass simulator", "satqkd"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  std::string json_path;
  int threads = 0;
  bool no_metadata = false;
  bool verbose = false;
  app.add_option("-c,--config", config_path, "Scenario file (INI)");
  app.add_option("--set", overrides, "Override one key, section.key=value (repeatable)")->allow_extra_args(false);
  app.add_option("-o,--out", out_path, "CSV output path (default stdout)");
  app.add_option("--json", json_path, "Write a JSON run summary to this path");
  app.add_option("--threads", threads, "Worker thread cap")->check(CLI::NonNegativeNumber);
  app.add_flag("--no-metadata", no_metadata, "Omit the timestamp/hash comment line");
  app.add_flag("-v,--verbose", verbose, "List every defaulted key");

  auto* cmd_loss = app.add_subcommand("loss-profile", "Per-bin ranges, elevations and link losses for one pass");
  auto* cmd_pass = app.add_subcommand("pass", "Optimised key length for one pass");
  auto* cmd_block = app.add_subcommand("block-sweep", "Key length against block size for each background scale");
  std::vector<double> block_scales;
  cmd_block->add_option("--background-scale", block_scales, "Background scale factors")->delimiter(',')->allow_extra_args(false);

  auto* cmd_sweep = app.add_subcommand("sweep", "Cartesian sweep over geometry and background axes");
  SweepAxes axes_flags;
  auto list_opt = [&](const char* name, std::vector<double>& v, const char* help) {
    cmd_sweep->add_option(name, v, help)->delimiter(',')->allow_extra_args(false);
  };
  list_opt("--altitude-m", axes_flags.altitude_m, "Altitudes, m");
  list_opt("--separation-m", axes_flags.separation_m, "Station separations, m");
  list_opt("--phi-deg", axes_flags.phi_deg, "Track/baseline angles, deg");
  list_opt("--xi-deg", axes_flags.xi_deg, "Orbit tilts, deg");
  list_opt("--offset-m", axes_flags.offset_m, "Baseline-midpoint offsets, m");
  list_opt("--background-scale", axes_flags.background_scale, "Background scale factors");

  auto* cmd_annual = app.add_subcommand("annual", "Annual key yield over overpass angles");
  int gamma_samples = 0;
  bool symmetry = false;
  bool full_circle = false;
  std::string gamma_mask;
  cmd_annual->add_option("--gamma-samples", gamma_samples, "Samples over [0, 180] deg (odd)");
  cmd_annual->add_flag("--symmetry", symmetry, "Sample [0, 90] deg and mirror");
  cmd_annual->add_flag("--no-symmetry", full_circle, "Evaluate every gamma sample")->excludes("--symmetry");
  cmd_annual->add_option("--gamma-mask", gamma_mask, "Allowed gamma ranges, lo:hi[,lo:hi...] deg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  const std::string command = app.get_subcommands().front()->get_name();

  if (cmd_annual->parsed()) {
    if (gamma_samples > 0) overrides.push_back(fmt::format("annual.gamma_samples={}", gamma_samples));
    if (symmetry) overrides.push_back("annual.symmetry=true");
    if (full_circle) overrides.push_back("annual.symmetry=false");
    if (!gamma_mask.empty()) overrides.push_back("annual.gamma_mask_deg=" + gamma_mask);
  }

  ParsedScenario parsed;
  try {
    parsed = config_path.empty() ? parse_scenario_text("", std::filesystem::current_path(), overrides, "<defaults>")
                                 : parse_scenario(config_path, overrides);
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  }
  if (verbose)
    for (const auto& n : parsed.notices) err << "note: " << n << '\n';
  Scenario sc = parsed.scenario;

  SweepAxes axes = sc.sweep;
  for (auto [flag, field] : {std::pair{&axes_flags.altitude_m, &axes.altitude_m}, {&axes_flags.separation_m, &axes.separation_m},
                             {&axes_flags.phi_deg, &axes.phi_deg}, {&axes_flags.xi_deg, &axes.xi_deg},
                             {&axes_flags.offset_m, &axes.offset_m}, {&axes_flags.background_scale, &axes.background_scale}})
    if (!flag->empty()) *field = *flag;
  // A tilt flag replaces an offset axis from the file and vice versa; both flags together is an error.
  if (!axes_flags.xi_deg.empty() && axes_flags.offset_m.empty()) axes.offset_m.clear();
  if (!axes_flags.offset_m.empty() && axes_flags.xi_deg.empty()) axes.xi_deg.clear();
  if (cmd_sweep->parsed()) {
    if (const auto v = axes.violations(); !v.empty()) {
      err << "error: invalid sweep axes:\n";
      for (const auto& s : v) err << "  " << s << '\n';
      return kConfig;
    }
  }
  for (double f : block_scales)
    if (!(f >= 0.0)) {
      err << "error: --background-scale entries must be >= 0\n";
      return kConfig;
    }

  parallel::set_threads(threads);

  Table table;
  try {
    const ScenarioData data = load_data(sc);
    if (cmd_loss->parsed()) table = loss_profile(sc, data);
    else if (cmd_pass->parsed()) table = pass(sc, data);
    else if (cmd_block->parsed()) table = block_sweep(sc, data, block_scales);
    else if (cmd_sweep->parsed()) table = sweep(sc, data, axes);
    else table = annual(sc, data, sc.annual);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }

  std::string hash_input = command + "\n" + emit_scenario(sc);
  for (double f : block_scales) hash_input += "f=" + num(f);
  const std::string hash = fmt::format("{:016x}", fnv1a(hash_input));
  const std::string generated = utc_now();

  std::ostringstream csv;
  CsvWriter w(csv);
  if (!no_metadata) w.comment(fmt::format("satqkd {} generated={} params={} grid_n={}", command, generated, hash, sc.security.grid_n));
  for (const auto& n : table.notes) w.comment(n);
  w.header(table.header);
  for (const auto& r : table.rows) w.row(r);

  if (out_path.empty() || out_path == "-") {
    out << csv.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!(f << csv.str()) || !f.flush()) {
      err << "error: cannot write " << out_path << '\n';
      return kRuntime;
    }
  }

  if (!json_path.empty()) {
    nlohmann::json j = table.summary;
    j["command"] = command;
    j["parameter_hash"] = hash;
    j["generated"] = generated;
    j["grid_n"] = sc.security.grid_n;
    j["threads"] = parallel::max_threads();
    j["rows"] = table.rows.size();
    j["runtime_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::ofstream f(json_path);
    if (!(f << j.dump(2) << '\n')) {
      err << "error: cannot write " << json_path << '\n';
      return kRuntime;
    }
  }
  return kOk;
}

}  // namespace satqkd::cli

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <fstream>

#include "satqkd/scenario.hpp"

using namespace satqkd;
namespace fs = std::filesystem;

namespace {

std::string problems_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_scenario_text(text, fs::current_path(), overrides, "t.ini");
  } catch (const ScenarioError& e) {
    std::string all;
    for (const auto& p : e.problems()) all += p + "\n";
    return all;
  }
  return {};
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("empty file gives the reference defaults") {
    const auto p = parse_scenario_text("", fs::current_path());
    CHECK(p.scenario == Scenario{});
    CHECK(p.scenario.geometry.altitude_m == 500e3);
    CHECK(p.scenario.optics.rx_diameter_m == 0.7);
    CHECK(p.scenario.detector.p_dark == 5e-7);
    CHECK(p.scenario.source.pair_rate_hz == 2e8);
    CHECK(p.scenario.security.s == 6);
    CHECK_FALSE(p.notices.empty());
  }

  TEST_CASE("invalid altitude names the invariant") {
    const auto msg = problems_of("[geometry]\naltitude_m = -1\n");
    CHECK(msg.find("altitude_m") != std::string::npos);
  }

  TEST_CASE("every problem is reported") {
    const auto msg = problems_of("[geometry]\naltitude_m = -1\nbogus = 3\n[counts]\np_dark = 2\n[finitekey]\ngrid_n = x\n");
    CHECK(msg.find("altitude_m") != std::string::npos);
    CHECK(msg.find("unknown key 'bogus'") != std::string::npos);
    CHECK(msg.find("p_dark") != std::string::npos);
    CHECK(msg.find("grid_n") != std::string::npos);
    CHECK(msg.find("t.ini:") != std::string::npos);
  }

  TEST_CASE("unknown section and malformed syntax") {
    CHECK(problems_of("[orbit]\nx = 1\n").find("unknown") != std::string::npos);
    CHECK(problems_of("[geometry\n").find("t.ini:1") != std::string::npos);
  }

  TEST_CASE("emit and re-parse is the identity") {
    Scenario sc;
    sc.geometry.separation_m = 1234e3;
    sc.geometry.phi_deg = 17.5;
    sc.optics.wavelength_b_m = 810e-9;
    sc.optics.aperture_convention = ApertureConvention::diameter;
    sc.detector.background_scale = 37.0;
    sc.security.threshold_model = ThresholdModel::max;
    sc.sweep.altitude_m = {300e3, 400e3};
    sc.sweep.background_scale = {1.0, 10.0};
    sc.annual.symmetry = false;
    sc.annual.gamma_mask = {{10.0, 80.0}};
    CHECK(parse_scenario_text(emit_scenario(sc), fs::current_path()).scenario == sc);

    const Scenario defaults;
    const auto back = parse_scenario_text(emit_scenario(defaults), fs::current_path());
    CHECK(back.scenario == defaults);
    CHECK(back.notices.empty());
  }

  TEST_CASE("overrides apply on top of the file") {
    const auto p = parse_scenario_text("[geometry]\nogs_separation_m = 700000\n", fs::current_path(),
                                       {"geometry.ogs_separation_m=900000", "finitekey.grid_n=32"});
    CHECK(p.scenario.geometry.separation_m == 900e3);
    CHECK(p.scenario.security.grid_n == 32);
    CHECK(problems_of("", {"nonsense"}).find("section.key=value") != std::string::npos);
    CHECK(problems_of("", {"geometry.nope=1"}).find("unknown key") != std::string::npos);
  }

  TEST_CASE("list and mask syntax") {
    const auto p = parse_scenario_text("[sweep]\nphi_deg = 0, 30,60\n[annual]\ngamma_mask_deg = 0:90,270:360\n",
                                       fs::current_path());
    CHECK(p.scenario.sweep.phi_deg == std::vector<double>{0.0, 30.0, 60.0});
    REQUIRE(p.scenario.annual.gamma_mask.size() == 2);
    CHECK(p.scenario.annual.gamma_mask[1] == GammaRange{270.0, 360.0});
    CHECK(problems_of("[sweep]\nxi_deg = 1\noffset_m = 3\n").find("alternatives") != std::string::npos);
  }

  TEST_CASE("bundled scenario file reproduces the defaults") {
    const auto p = parse_scenario(fs::path(SATQKD_DEFAULT_DATA_DIR) / "default_scenario.ini");
    Scenario expect;
    expect.atmosphere_table_path = p.scenario.atmosphere_table_path;
    expect.radiance_table_path_a = p.scenario.radiance_table_path_a;
    expect.radiance_table_path_b = p.scenario.radiance_table_path_b;
    expect.sweep.separation_m = {500e3, 1000e3, 1500e3, 2000e3};
    CHECK(p.scenario == expect);
    CHECK(fs::exists(p.scenario.atmosphere_table_path));
    CHECK(p.notices.empty());

    const auto data = load_data(p.scenario);
    const auto builtin = load_data(Scenario{});
    CHECK(data.atm_a.transmissivities() == builtin.atm_a.transmissivities());
    CHECK(data.sky.radiance_a.at(30.0) == doctest::Approx(builtin.sky.radiance_a.at(30.0)).epsilon(1e-14));
  }

  TEST_CASE("data path search order") {
    const fs::path dir = fs::temp_directory_path() / "satqkd_paths";
    fs::create_directories(dir);
    { std::ofstream(dir / "local_only.csv") << "x\n"; }
    CHECK(resolve_data_path("local_only.csv", dir) == dir / "local_only.csv");
    CHECK(resolve_data_path("atmosphere_785nm_airmass.csv", dir) ==
          fs::path(SATQKD_DEFAULT_DATA_DIR) / "atmosphere_785nm_airmass.csv");
    CHECK(resolve_data_path("missing.csv", dir).empty());

    ::setenv("SATQKD_DATA_DIR", dir.c_str(), 1);
    CHECK(resolve_data_path("local_only.csv", fs::path("/nonexistent")) == dir / "local_only.csv");
    ::unsetenv("SATQKD_DATA_DIR");

    CHECK(problems_of("[channel]\natmosphere_table_path = missing.csv\n").find("not found") != std::string::npos);
    fs::remove_all(dir);
  }

  TEST_CASE("missing config file") {
    CHECK_THROWS_AS(parse_scenario("/nonexistent/x.ini"), ScenarioError);
  }
}

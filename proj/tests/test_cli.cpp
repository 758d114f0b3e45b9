#include <doctest.h>

#include <filesystem>
#include <stdexcept>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "satqkd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = satqkd::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::string header_of(const std::string& csv) {
  for (const auto& l : lines(csv))
    if (!l.empty() && l[0] != '#') return l;
  return {};
}

// Unit suffixes a physical column may carry; dimensionless columns are listed.
bool names_unit(const std::string& col) {
  for (const char* suffix : {"_s", "_m", "_deg", "_db", "_bits", "_hz"})
    if (col.size() > std::string(suffix).size() && col.ends_with(suffix)) return true;
  for (const char* bare : {"visible", "delta", "qber", "beta", "nu", "xi", "eps_pe", "eps_pa", "background_scale", "error"})
    if (col == bare) return true;
  return false;
}

const std::vector<std::string> kQuick{"--set", "finitekey.grid_n=16", "--set", "finitekey.n_thresholds=6"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors") {
    CHECK(run({}).code == satqkd::cli::kUsage);
    CHECK(run({"pass", "--no-such-flag"}).code == satqkd::cli::kUsage);
    CHECK(run({"teleport"}).code == satqkd::cli::kUsage);
    CHECK(run({"--help"}).code == satqkd::cli::kOk);
  }

  TEST_CASE("config errors exit 2 and list every problem") {
    const auto r = run({"--set", "geometry.altitude_m=-1", "--set", "counts.p_dark=3", "pass"});
    CHECK(r.code == satqkd::cli::kConfig);
    CHECK(r.err.find("altitude_m") != std::string::npos);
    CHECK(r.err.find("p_dark") != std::string::npos);
    CHECK(run({"-c", "/nonexistent.ini", "pass"}).code == satqkd::cli::kConfig);
    CHECK(run({"sweep", "--xi-deg", "1", "--offset-m", "2"}).code != satqkd::cli::kOk);
  }

  TEST_CASE("unwritable output exits 3") {
    CHECK(run(with(kQuick, {"-o", "/nonexistent/dir/out.csv", "loss-profile"})).code == satqkd::cli::kRuntime);
  }

  TEST_CASE("pass writes one row with unit-bearing headers") {
    const auto r = run(with(kQuick, {"--no-metadata", "pass"}));
    REQUIRE(r.code == satqkd::cli::kOk);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 2);
    std::istringstream cols(ls[0]);
    for (std::string c; std::getline(cols, c, ',');) CHECK_MESSAGE(names_unit(c), c);
  }

  TEST_CASE("every command labels its columns") {
    for (const auto& cmd : std::vector<std::vector<std::string>>{
             {"loss-profile"}, {"block-sweep", "--background-scale", "1,10"},
             {"sweep", "--separation-m", "500000", "--phi-deg", "0,30"}, {"annual", "--gamma-samples", "5"}}) {
      const auto r = run(with(kQuick, cmd));
      REQUIRE(r.code == satqkd::cli::kOk);
      std::istringstream cols(header_of(r.out));
      for (std::string c; std::getline(cols, c, ',');) CHECK_MESSAGE(names_unit(c), c);
    }
  }

  TEST_CASE("metadata line and determinism") {
    const auto args = with(kQuick, {"sweep", "--separation-m", "500000,1500000"});
    const auto a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(lines(a.out)[0].rfind("# satqkd sweep generated=", 0) == 0);
    auto body = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
    CHECK(body(a.out) == body(b.out));
    const auto c = run(with(args, {"--no-metadata"}));
    CHECK(c.out == body(a.out));
  }

  TEST_CASE("file output and json summary") {
    const fs::path dir = fs::temp_directory_path() / "satqkd_cli";
    fs::create_directories(dir);
    const auto r = run(with(kQuick, {"-o", (dir / "p.csv").string(), "--json", (dir / "p.json").string(), "pass"}));
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(fs::file_size(dir / "p.csv") > 0);
    std::ifstream in(dir / "p.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["command"] == "pass");
    CHECK(j["grid_n"] == 16);
    CHECK(j["rows"] == 1);
    CHECK(j.contains("parameter_hash"));
    CHECK(j.contains("runtime_s"));
    fs::remove_all(dir);
  }

  TEST_CASE("annual reports the yearly total") {
    const auto r = run(with(kQuick, {"--no-metadata", "annual", "--gamma-samples", "5", "--no-symmetry"}));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# skl_year_bits = ") != std::string::npos);
    CHECK(lines(r.out).size() == 2 + 1 + 5);
  }
}

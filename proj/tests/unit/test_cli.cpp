#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "phonon_forge/cli.hpp"
#include "phonon_forge/error.hpp"

using namespace phonon_forge;
using namespace phonon_forge::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("phonon_forge_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("empty config gives the documented defaults") {
  const RunConfig c = parse_config_text("");
  CHECK(c.params.chi_bar == 1e-3);
  CHECK(c.params.kappa[0] == 1e-3);
  CHECK(c.params.kappa[1] == 1e-3);
  CHECK(c.params.gamma[0] == 0.0);
  CHECK(c.params.nbar[0] == 0.0);
  CHECK(c.params.theta == doctest::Approx(pi / 4));
  CHECK(c.params.scenario == Scenario::individual);
  CHECK_FALSE(c.method.has_value());
}

TEST_CASE("sections, comments and flag precedence") {
  const std::string text =
      "# demo\n"
      "[model]\n"
      "theta = 0.5   # inline\n"
      "targets = 3, 4\n"
      "gamma = 1e-6, 2e-6\n"
      "scenario = SR\n"
      "[solver]\n"
      "method = nullspace\n"
      "[sweep]\n"
      "preset = fig2b\n"
      "theta_grid = 0.5, 0.6\n"
      "targets = 1,1; 2,3\n";
  const RunConfig c = parse_config_text(text, {{"theta", "0.9"}});
  CHECK(c.params.theta == 0.9);
  CHECK(c.params.targets[0] == 3);
  CHECK(c.params.targets[1] == 4);
  CHECK(c.params.gamma[1] == 2e-6);
  CHECK(c.params.scenario == Scenario::shared);
  REQUIRE(c.method.has_value());
  CHECK(*c.method == SteadyMethod::nullspace);
  CHECK(*c.preset == "fig2b");
  CHECK(c.theta_grid.size() == 2);
  REQUIRE(c.targets.size() == 2);
  CHECK(c.targets[1] == std::pair<int, int>{2, 3});
  CHECK(parse_config_text("[model]\ntheta = 0.5\n").params.theta == 0.5);
}

TEST_CASE("config errors") {
  try {
    parse_config_text("gamm = 1e-3\n");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    CHECK(std::string(e.what()).find("'model.gamma'") != std::string::npos);
  }
  try {
    parse_config_text("[model]\ntheta = abc\n");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("real number") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("[solver]\ntheta = 1\n"), Error);
  CHECK_THROWS_AS(parse_config_text("[nowhere]\n"), Error);
  CHECK_THROWS_AS(parse_config_text("theta 1\n"), Error);
  CHECK(nearest_key("kapa") == "model.kappa");
  CHECK(known_keys().size() > 20);
}

TEST_CASE("sweep fig6 writes ten rows") {
  const auto dir = scratch("fig6");
  RunConfig c = parse_config_text("", {{"run.command", "sweep"}, {"preset", "fig6"}, {"m_max", "10"}});
  c.output_dir = dir;
  std::ostringstream out, err;
  CHECK(dispatch(c, out, err) == exit_ok);
  const std::string csv = slurp(dir / "fig6.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
  CHECK(csv.rfind("# units: omega_m = 1", 0) == 0);
  const auto meta = nlohmann::json::parse(slurp(dir / "fig6.json"));
  CHECK(meta["config"]["m_max"] == 10);

  std::ostringstream out2;
  RunConfig again = c;
  dispatch(again, out2, err);
  CHECK(slurp(dir / "fig6.csv") == csv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("calibrate prints the calibration and checks") {
  const auto dir = scratch("calibrate");
  RunConfig c = parse_config_text("", {{"run.command", "calibrate"}, {"targets", "5,5"}});
  c.output_dir = dir;
  std::ostringstream out, err;
  CHECK(dispatch(c, out, err) == exit_ok);
  for (const char* key : {"eta1", "eta2", "Omega1", "Omega2", "Delta1", "Delta2", "blockade", "truncation"})
    CHECK(out.str().find(key) != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("errors map to exit codes with JSON on stderr") {
  const auto dir = scratch("errors");
  RunConfig c = parse_config_text("", {{"run.command", "calibrate"}, {"chi_bar", "1.0"}});
  c.output_dir = dir;
  std::ostringstream out, err;
  CHECK(dispatch(c, out, err) == exit_config);
  const auto j = nlohmann::json::parse(err.str());
  CHECK(j["error"]["code"] == "calibration");

  std::filesystem::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  RunConfig io = parse_config_text("", {{"run.command", "sweep"}, {"preset", "fig6"}});
  io.output_dir = dir / "file" / "sub";
  std::ostringstream err2;
  CHECK(dispatch(io, out, err2) == exit_io);
  CHECK(nlohmann::json::parse(err2.str())["error"]["code"] == "io");
  std::filesystem::remove_all(dir);
}

TEST_CASE("validate runs the oracle suite") {
  RunConfig c = parse_config_text("", {{"run.command", "validate"}});
  std::ostringstream out, err;
  CHECK(dispatch(c, out, err) == exit_ok);
  CHECK(out.str().find("all checks passed") != std::string::npos);
  for (const auto& check : run_validation_suite()) CHECK_MESSAGE(check.passed, check.name << ": " << check.detail);
}

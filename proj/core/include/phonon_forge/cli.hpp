#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "phonon_forge/dynamics.hpp"
#include "phonon_forge/measures.hpp"
#include "phonon_forge/model.hpp"

namespace phonon_forge::cli {

enum class Command { steady, evolve, sweep, calibrate, validate };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config = 2,
  exit_solver = 3,
  exit_io = 4,
};

struct RunConfig {
  Command command = Command::steady;
  std::optional<std::string> preset;
  ModelParams params{};
  std::filesystem::path output_dir = "results";
  int parallelism = 0;    ///< 0: PHONON_FORGE_THREADS, else hardware concurrency
  std::int64_t seed = 0;  ///< reserved for stochastic methods

  /// Unset: nullspace when gamma > 0, time marching otherwise.
  std::optional<SteadyMethod> method;
  double tol = 1e-10;
  double t_final = 5e4;
  double dt_out = 500.0;
  double gamma_over_kappa = -1.0;  ///< >= 0 sets gamma = ratio * kappa

  int m_max = 5;
  bool large = false;
  std::vector<double> theta_grid;             ///< empty: default grid
  std::vector<double> gamma_over_kappa_grid;  ///< empty: preset default
  std::vector<std::pair<int, int>> targets;   ///< sweep targets; empty: preset default
  double sweep_nbar = 0.3;                    ///< thermal occupation of the fig4 preset
  LogBase log_base = LogBase::natural;
  bool audit_truncation = true;

  nlohmann::json to_json() const;
};

/// (key, value) pairs from command-line flags; keys may be bare ("theta")
/// or qualified ("model.theta").
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Flat key-value grammar:
///   # comment
///   [model]            section header ([model], [solver], [output], [sweep])
///   key = value
/// Flag overrides win over file values, which win over defaults.
RunConfig parse_config_text(const std::string& text, const Overrides& overrides = {});
RunConfig parse_config(const std::optional<std::filesystem::path>& file, const Overrides& overrides = {});

/// All accepted keys as "section.key".
std::vector<std::string> known_keys();

/// Closest known key by edit distance.
std::string nearest_key(const std::string& key);

/// Runs the configured command, writing tables under output_dir and a
/// human-readable summary to `out`. Errors are reported on `err` as JSON
/// and mapped to an ExitCode.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle fixture suite behind `validate`.
std::vector<ValidationCheck> run_validation_suite();

}  // namespace phonon_forge::cli

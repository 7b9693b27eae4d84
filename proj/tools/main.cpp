#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phonon_forge/cli.hpp"
#include "phonon_forge/error.hpp"

namespace pf = phonon_forge;

int main(int argc, char** argv) {
  CLI::App app{"phonon-forge: steady-state entanglement of two sliced phonon modes"};
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> sets;
  pf::cli::Overrides flags;

  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const std::vector<Flag> value_flags{
      {"--theta", "model.theta", "Mixing angle (rad)"},
      {"--targets", "model.targets", "Target Fock numbers M1,M2"},
      {"--chi-bar", "model.chi_bar", "Coupling scale chi_bar"},
      {"--kappa", "model.kappa", "Photon decay rate(s)"},
      {"--gamma", "model.gamma", "Mechanical damping rate(s)"},
      {"--nbar", "model.nbar", "Thermal occupation(s)"},
      {"--scenario", "model.scenario", "IR or SR"},
      {"--d-m", "model.d_m", "Phonon truncation (0: max(M)+3)"},
      {"--d-c", "model.d_c", "Photon truncation of the full model"},
      {"--method", "solver.method", "auto, time-marching or nullspace"},
      {"--tol", "solver.tol", "Steady-state residual tolerance"},
      {"--t-final", "solver.t_final", "Final time (omega_m^-1)"},
      {"--dt-out", "solver.dt_out", "Output spacing (omega_m^-1)"},
      {"--gamma-over-kappa", "solver.gamma_over_kappa", "Set gamma = ratio * kappa"},
      {"-j,--threads", "solver.parallelism", "Worker threads"},
      {"--seed", "solver.seed", "Seed (reserved)"},
      {"-o,--output-dir", "output.dir", "Directory for tables"},
      {"--log-base", "output.log_base", "WLN logarithm base: e or 2"},
      {"--preset", "sweep.preset", "fig2a, fig2b, fig3, fig4, fig5 or fig6"},
      {"--m-max", "sweep.m_max", "Largest target for fig2a/fig6"},
      {"--theta-grid", "sweep.theta_grid", "Comma-separated angles"},
      {"--gamma-over-kappa-grid", "sweep.gamma_over_kappa_grid", "Comma-separated ratios"},
      {"--sweep-targets", "sweep.targets", "Targets 'M1,M2;M1,M2'"},
      {"--sweep-nbar", "sweep.nbar", "Thermal occupation of the fig4 preset"},
  };
  std::vector<std::optional<std::string>> values(value_flags.size());
  bool large = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_file, "Config file (key = value, [sections])");
    sub->add_option("--set", sets, "Override any key: section.key=value")->take_all();
    for (std::size_t i = 0; i < value_flags.size(); ++i) sub->add_option(value_flags[i].name, values[i], value_flags[i].help);
    sub->add_flag("--large", large, "Full 8x8 fig2a grid and high-M fig2b targets");
  };
  std::string command;
  for (const char* name : {"steady", "evolve", "sweep", "calibrate", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub);
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pf::cli::exit_config;
  }

  flags.emplace_back("run.command", command);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << nlohmann::json{{"error", {{"code", "config"}, {"message", "--set expects key=value"}, {"command", command}}}}
                       .dump()
                << '\n';
      return pf::cli::exit_config;
    }
    flags.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  for (std::size_t i = 0; i < value_flags.size(); ++i)
    if (values[i]) flags.emplace_back(value_flags[i].key, *values[i]);
  if (large) flags.emplace_back("sweep.large", "true");

  pf::cli::RunConfig config;
  try {
    config = pf::cli::parse_config(config_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_file),
                                   flags);
  } catch (const pf::Error& e) {
    std::cerr << nlohmann::json{{"error",
                                 {{"code", std::string(pf::to_string(e.code()))}, {"message", e.what()}, {"command", command}}}}
                     .dump()
              << '\n';
    return e.code() == pf::ErrorCode::io ? pf::cli::exit_io : pf::cli::exit_config;
  }
  return pf::cli::dispatch(config, std::cout, std::cerr);
}

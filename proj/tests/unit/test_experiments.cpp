#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include <doctest.h>

#include "phonon_forge/error.hpp"
#include "phonon_forge/experiments.hpp"
#include "phonon_forge/fock.hpp"

using namespace phonon_forge;

TEST_CASE("default theta grid") {
  const auto g = default_theta_grid();
  REQUIRE(g.size() == 25);
  CHECK(g.front() > pi / 8);
  CHECK(g.back() == doctest::Approx(0.49 * pi));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("fig6 table") {
  const ResultTable t = run_fig6(10);
  REQUIRE(t.size() == 10);
  CHECK(t.number(0, "eta") == doctest::Approx(std::sqrt(2.0)));
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.number(i, "eta") < t.number(i - 1, "eta"));
  for (std::size_t i = 7; i < t.size(); ++i) CHECK(t.number(i, "eta") < 0.65);
  CHECK_THROWS_AS(run_fig6(0), Error);
}

TEST_CASE("two-mode squeezing bound") {
  CHECK(tms_bound() == doctest::Approx(1.61680).epsilon(1e-5));
  CHECK(tms_bound() == doctest::Approx(std::pow(2.0, std::log(2.0))));
  ResultTable t("x", {{"M1", "1"}, {"M2", "1"}, {"theta", "rad"}, {"N_inf", "1"}});
  t.add_row({std::int64_t{8}, std::int64_t{8}, 1.0, 1.7});
  t.add_row({std::int64_t{1}, std::int64_t{1}, 1.0, 0.5});
  const TmsReport r = compare_tms_bound(t);
  CHECK(r.exceeding.size() == 1);
  CHECK(r.covers_high_m);
}

TEST_CASE("parallel map") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (const int h : hits) CHECK(h == 1);
  CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }));
  setenv("PHONON_FORGE_THREADS", "3", 1);
  CHECK(default_parallelism() == 3);
  unsetenv("PHONON_FORGE_THREADS");
  CHECK(default_parallelism() >= 1);
}

TEST_CASE("measures of a normal-mode Fock product") {
  const ModeLayout l({{"B1", 4}, {"B2", 4}});
  const DensityMatrix rho = DensityMatrix::pure(l, kron(fock_ket(4, 1), fock_ket(4, 1)));
  const PointMeasures m = measure_mechanical(rho, pi / 4, true);
  CHECK(m.negativity == doctest::Approx(0.5));
  CHECK(m.purity == doctest::Approx(1.0));
  CHECK(m.wln >= 0.0);
}

TEST_CASE("per-cell fast path matches the joint IR solve") {
  for (const double gamma : {0.0, 1e-6}) {
    ModelParams p;
    p.gamma = {gamma, gamma};
    p = point_params(p, {1, 2}, pi / 4);
    const MechanicalSolution fast = solve_mechanical_steady(p, {});
    REQUIRE(fast.rho);
    const ModeLayout layout = effective_layout(p);
    const Liouvillian L = build_liouvillian(build_effective_hamiltonian(p, layout), build_dissipators(p, layout));
    SteadyOptions o;
    o.method = gamma > 0.0 ? SteadyMethod::nullspace : SteadyMethod::time_marching;
    const SteadyState joint = steady_state(L, initial_state(p, layout), o);
    CHECK(trace_distance(*fast.rho, partial_trace(joint.rho, {"B1", "B2"})) < 1e-8);
  }
}

TEST_CASE("sweeps are deterministic") {
  PresetOptions o;
  o.parallelism = 1;
  const std::string a = run_fig2a(2, pi / 4, o).to_csv();
  o.parallelism = 3;
  const std::string b = run_fig2a(2, pi / 4, o).to_csv();
  CHECK(a == b);
  const ResultTable t = run_fig2a(2, pi / 4, o);
  CHECK(t.size() == 4);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t.text(i, "status") == "ok");
    CHECK(t.number(i, "residual") < 1e-10);
  }
  CHECK(t.meta.contains("params"));
}

TEST_CASE("result table persistence") {
  ResultTable t("demo", {{"M", "1"}, {"t", "omega_m^-1"}, {"status", "1"}});
  t.add_row({std::int64_t{2}, 0.1, std::string("ok")});
  t.add_row({std::int64_t{1}, 1.0 / 3.0, std::string("error: a, b")});
  CHECK_THROWS_AS(t.add_row({std::int64_t{1}}), Error);
  t.sort_rows(1);
  CHECK(t.number(0, "M") == 1.0);
  const std::string csv = t.to_csv();
  CHECK(csv.find("M[1],t[omega_m^-1],status[1]") != std::string::npos);
  CHECK(csv.find("0.333333333333") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "phonon_forge_table_test";
  t.write_csv(dir / "demo.csv");
  t.write_metadata(dir / "demo.json");
  const ResultTable back = ResultTable::read_csv(dir / "demo.csv", "demo");
  CHECK(back.to_csv() == csv);
  CHECK(back.text(0, "status") == "error: a, b");
  CHECK(back.schema()[1].unit == "omega_m^-1");
  std::filesystem::remove_all(dir);
}

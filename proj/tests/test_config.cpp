#include "doctest.h"

#include "exitlab/config.hpp"
#include "exitlab/csv.hpp"
#include "exitlab/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace exitlab;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("parse a full configuration") {
  const RunConfig cfg = parse_config(R"(
potential:
  name: corniche
  params: {delta: 0.04}
simulation:
  dt: 0.002
  h: 0.3
  seed: 99
  h_grid: [0.5, 0.4]
  workers: 2
qsd:
  n_particles: 100
  max_time: 10
windows:
  - {label: A, s_begin: 0, s_end: 2}
analysis:
  target_window: A
)");
  CHECK(cfg.potential == "corniche");
  CHECK(cfg.params.scalar("delta") == 0.04);
  CHECK_FALSE(cfg.params.has("a"));
  CHECK(cfg.dt == 0.002);
  CHECK(cfg.seed == 99);
  CHECK(cfg.h_grid == std::vector<double>{0.5, 0.4});
  CHECK(cfg.qsd_particles == 100);
  REQUIRE(cfg.windows.size() == 1);
  CHECK(cfg.windows[0].s_end == 2.0);
  CHECK(cfg.sim(0.7).h == 0.7);
  CHECK(cfg.qsd(0.7, 0).seed != cfg.qsd(0.7, 1).seed);
}

TEST_CASE("manifest round trip") {
  RunConfig cfg = figure_config("res1");
  cfg.h_grid = {1.0, 2.0 / 3.0};
  const std::string text = emit_manifest(cfg, {{"note", "x"}});
  const RunConfig back = parse_config(text);
  CHECK(emit_manifest(back, {{"note", "x"}}) == text);
  CHECK(back.h_grid[1] == 2.0 / 3.0);
  CHECK(text.find(kVersion) != std::string::npos);
}

TEST_CASE("configuration errors name the key") {
  try {
    parse_config("simulation:\n  dtt: 0.1\n");
    FAIL("accepted an unknown key");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    CHECK(std::string(e.what()).find("simulation.dtt") != std::string::npos);
  }
  CHECK(code_of([] { parse_config("simulation:\n  dt: -1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("simulation: [1, 2\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { load_config("/nonexistent/exitlab.yaml"); }) == ErrorCode::IoError);
}

TEST_CASE("overrides") {
  RunConfig cfg;
  apply_override(cfg, "simulation.dt=0.01");
  apply_override(cfg, "potential.params.a=0.05");
  CHECK(cfg.dt == 0.01);
  CHECK(cfg.params.scalar("a") == 0.05);
  CHECK(code_of([&] { apply_override(cfg, "simulation.nope=1"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_override(cfg, "no equals sign"); }) == ErrorCode::ConfigError);
  apply_override(cfg, "potential.params.a=0.2");
  CHECK(code_of([&] { build_landscape(cfg); }) == ErrorCode::InvalidParams);
}

TEST_CASE("output directory resolution") {
  RunConfig cfg;
  ::setenv("EXITLAB_OUTPUT_DIR", "/tmp/from_env", 1);
  CHECK(resolve_output_dir(cfg) == "/tmp/from_env");
  cfg.output_dir = "cfgdir";
  CHECK(resolve_output_dir(cfg) == "cfgdir");
  CHECK(resolve_output_dir(cfg, "cli") == "cli");
  ::unsetenv("EXITLAB_OUTPUT_DIR");
  cfg.output_dir.clear();
  CHECK(resolve_output_dir(cfg) == "exitlab_out");
}

TEST_CASE("csv numbers round trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9}) CHECK(parse_number(format_number(v)) == v);
  CHECK(csv_escape("a,b") == "\"a,b\"");
  std::istringstream in("x,y\n1,\"a,b\"\n");
  const CsvTable t = read_csv(in);
  CHECK(t.rows[0][t.column("y")] == "a,b");
  CHECK_THROWS_AS(t.column("z"), Error);
}

TEST_CASE("figure recipes") {
  CHECK(figure_config("res2").params.scalar("a") == 0.05);
  CHECK(figure_time_steps("res3").size() == 2);
  CHECK(code_of([] { figure_config("res9"); }) == ErrorCode::UnknownName);
}

TEST_CASE("small pipeline run") {
  RunConfig cfg = figure_config("res1");
  cfg.h_grid = {1.0, 0.8, 2.0 / 3.0};
  cfg.n_samples = 400;
  cfg.qsd_particles = 100;
  cfg.qsd_max_time = 20;
  const auto dir = std::filesystem::temp_directory_path() / "exitlab_pipeline_test";
  std::filesystem::remove_all(dir);
  const PipelineResult r = run_pipeline(cfg, dir.string());
  CHECK(r.target_index == 2);
  CHECK(r.summaries.size() == 3);
  REQUIRE(r.fit.has_value());
  for (const char* f : {"manifest.yaml", "inventory.csv", "hypotheses.csv", "summaries.csv", "fg_table.csv",
                        "fg_fit.csv", "qsd_h0.csv"})
    CHECK(std::filesystem::exists(dir / f));
  const RunConfig back = load_config((dir / "manifest.yaml").string());
  CHECK(back.n_samples == 400);
  std::filesystem::remove_all(dir);
}

#ifdef EXITLAB_CLI
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EXITLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command line exit codes") {
  CHECK(run_cli("rates --h-grid 0.5") == 0);
  CHECK(run_cli("oracle1d --f-coeffs 0,0,1 --z1 -1 --z2 2 --x 0 --h 0.4") == 0);
  CHECK(run_cli("rates --set simulation.dtt=1") == 2);
  CHECK(run_cli("rates --set potential.params.a=0.2") == 2);
  CHECK(run_cli("no-such-command") == 2);
  CHECK(run_cli("oracle1d --f-coeffs 0,0,1 --z1 1 --z2 2 --x 0 --h 0.4") == 3);
}
#endif

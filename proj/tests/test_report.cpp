#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "ncqm/experiments.hpp"
#include "ncqm/report.hpp"
#include "oracles.hpp"

using namespace ncqm;
namespace fs = std::filesystem;

namespace {

ExperimentConfig random_config(oracle::Gen& gen) {
  ExperimentConfig c;
  const auto& reg = registered_experiments();
  const int n = gen.integer(0, 3);
  for (int i = 0; i < n; ++i) c.experiments.push_back(reg[gen.integer(0, static_cast<int>(reg.size()) - 1)]);
  c.theta = gen.uniform(0.0, 1.0);
  c.mass = gen.uniform(0.1, 3.0);
  c.omega = gen.uniform(0.1, 3.0);
  c.sigma = gen.uniform(0.0, 2.0);
  c.grid.n_t = 1 << gen.integer(3, 9);
  c.grid.n_x = 1 << gen.integer(3, 9);
  c.grid.x_min = -gen.uniform(1, 20);
  c.grid.x_max = gen.uniform(1, 20);
  c.solver.dt = gen.uniform(0.0, 0.01);
  c.solver.steps = gen.integer(0, 5000);
  c.solver.K = gen.integer(1, 12);
  c.solver.method = gen.integer(0, 1) ? "fourier" : "series";
  c.output.directory = "out" + std::to_string(gen.integer(0, 99));
  c.output.formats = gen.integer(0, 1) ? std::vector<std::string>{"csv", "json"} : std::vector<std::string>{"json"};
  return c;
}

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(NCQM_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ncqm_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config round-trips through both serializations (property)") {
  oracle::Gen gen(83);
  for (int trial = 0; trial < 50; ++trial) {
    const ExperimentConfig c = random_config(gen);
    CHECK(ExperimentConfig::from_flat(c.to_flat()) == c);
    CHECK(ExperimentConfig::from_json(c.to_json()) == c);
    CHECK(ExperimentConfig::parse(c.to_json().dump()) == c);
  }
}

TEST_CASE("flat config accepts comments and rejects bad values") {
  const auto c = ExperimentConfig::from_flat("# comment\nexperiments = moments, galilean\ntheta = 0.2  # inline\n");
  CHECK(c.experiments == std::vector<std::string>{"moments", "galilean"});
  CHECK(c.theta == 0.2);
  CHECK_THROWS_AS(ExperimentConfig::from_flat("experiments = nope\n"), InvalidInput);
  CHECK_THROWS_AS(ExperimentConfig::from_flat("theta = -1\n"), InvalidInput);
  CHECK_THROWS_AS(ExperimentConfig::from_flat("grid.n_x = 100\n"), InvalidInput);
  CHECK_THROWS_AS(ExperimentConfig::from_flat("output.formats = xml\n"), InvalidInput);
  CHECK(registered_experiments().size() == 8);
}

TEST_CASE("report rows") {
  const auto pass = compare_row("e", "q", 1.0, 1.0 + 1e-7, 1e-6);
  CHECK(pass.pass);
  CHECK(pass.paper_value == 1.0);
  CHECK_FALSE(compare_row("e", "q", 1.0, 1.1, 1e-6).pass);
  CHECK_FALSE(compare_row("e", "q", 1.0, std::nan(""), 1e-6).pass);
  const auto free = check_row("e", "flag", 3.0, 0.0, true);
  CHECK_FALSE(free.paper_value.has_value());
  CHECK(all_pass({}));
  CHECK_FALSE(all_pass({pass, compare_row("e", "q", 0.0, 1.0, 0.5)}));
}

TEST_CASE("report CSV and JSON round-trip (property)") {
  oracle::Gen gen(89);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ReportRow> rows;
    const int n = gen.integer(0, 6);
    for (int i = 0; i < n; ++i) {
      if (gen.integer(0, 1))
        rows.push_back(compare_row("exp" + std::to_string(i), "q(theta=0.1)", gen.normal(), gen.normal(), 1e-3));
      else
        rows.push_back(check_row("exp", "[G,H]\"flag_" + std::to_string(i), gen.normal(), 0.0, gen.integer(0, 1) == 1));
    }
    std::ostringstream os;
    write_report_csv(os, rows);
    CHECK(parse_report_csv(os.str()) == rows);
    CHECK(report_from_json(nlohmann::json::parse(report_to_json(rows).dump())) == rows);
    const std::string text = os.str();
    CHECK(text.rfind("experiment,quantity,paper_value,computed,tolerance,pass\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == n + 1);
  }
}

TEST_CASE("reference table") {
  CHECK(reference("variance.det") == 0.1875);
  CHECK(reference("packet.width_sigma1_t1") == doctest::Approx(1.1892071).epsilon(1e-7));
  CHECK_THROWS_AS(reference("no.such.key"), InvalidInput);
  for (const auto& r : reference_values()) CHECK_FALSE(r.meaning.empty());
}

TEST_CASE("empty experiment list gives an empty report") {
  ExperimentConfig c;
  c.output.directory.clear();
  CHECK(run_experiments(c).empty());
  CHECK_THROWS_AS(run_experiment("nope", c), InvalidInput);
}

TEST_CASE("cli: exit codes, formats and output files") {
  const fs::path dir = scratch("cli");
  {
    std::ofstream cfg(dir / "empty.cfg");
    cfg << "# nothing to run\nexperiments =\n";
  }
  auto r = run_cli("--config " + (dir / "empty.cfg").string());
  CHECK(r.status == 0);
  CHECK(r.out == "experiment,quantity,paper_value,computed,tolerance,pass\n");

  r = run_cli("--experiment galilean --out " + (dir / "empty.cfg" / "sub").string());
  CHECK(r.status == 2);  // unwritable output directory
  r = run_cli("--experiment galilean --out " + (dir / "g").string());
  CHECK(r.status == 0);
  CHECK(fs::exists(dir / "g" / "report.csv"));

  r = run_cli("--experiment galilean --format json");
  CHECK(r.status == 0);
  const auto rows = report_from_json(nlohmann::json::parse(r.out));
  CHECK(rows.size() >= 3);

  r = run_cli("--experiment moments");
  CHECK(r.status == 1);  // the variance-table rows fail
  CHECK(r.out.find("moments,variance_table_det,0.1875") != std::string::npos);

  CHECK(run_cli("--experiment nope").status == 2);
  CHECK(run_cli("--theta -1 --experiment galilean").status == 2);
  CHECK(run_cli("--format xml").status == 2);
  CHECK(run_cli("--config /no/such/file").status == 2);
  fs::remove_all(dir);
}

TEST_CASE("cli output is byte-stable") {
  const auto a = run_cli("--experiment galilean,symplectic --theta 0.2");
  const auto b = run_cli("--experiment galilean,symplectic --theta 0.2");
  CHECK(a.status == b.status);
  CHECK(a.out == b.out);
}

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "ncqm/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Batch runner for the noncommutative quantum mechanics experiments"};
  std::string config_path, experiment, out_dir, format;
  double theta = 0.0;
  app.add_option("--config", config_path, "flat key=value or JSON experiment file")->check(CLI::ExistingFile);
  app.add_option("--experiment", experiment, "experiment name, or a comma-separated list");
  auto* theta_opt = app.add_option("--theta", theta, "override theta");
  app.add_option("--out", out_dir, "directory for the report and data files");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"csv", "json"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  ncqm::ExperimentConfig config;
  std::vector<ncqm::ReportRow> rows;
  try {
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      std::stringstream ss;
      ss << is.rdbuf();
      config = ncqm::ExperimentConfig::parse(ss.str());
    } else {
      config.output.directory.clear();
    }
    if (!experiment.empty()) config.experiments = ncqm::ExperimentConfig::from_flat("experiments = " + experiment).experiments;
    if (*theta_opt) config.theta = theta;
    if (!out_dir.empty()) config.output.directory = out_dir;
    if (!format.empty()) config.output.formats = {format};
    config.validate();
    rows = ncqm::run_experiments(config);
  } catch (const ncqm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (auto* cf = dynamic_cast<const ncqm::ConvergenceFailure*>(&e)) std::cerr << cf->diagnostics() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  const auto& formats = config.output.formats;
  const bool json_only = formats.size() == 1 && formats[0] == "json";
  if (json_only) std::cout << ncqm::report_to_json(rows).dump(2) << '\n';
  else ncqm::write_report_csv(std::cout, rows);
  if (!config.output.directory.empty()) {
    for (const auto& f : formats) {
      const std::string path = config.output.directory + "/report." + f;
      std::ofstream os(path);
      if (!os) {
        std::cerr << "error: cannot write " << path << '\n';
        return 2;
      }
      if (f == "json") os << ncqm::report_to_json(rows).dump(2) << '\n';
      else ncqm::write_report_csv(os, rows);
    }
  }
  return ncqm::all_pass(rows) ? 0 : 1;
}

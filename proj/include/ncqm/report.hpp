#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ncqm {

struct ReportRow {
  std::string experiment;
  std::string quantity;
  std::optional<double> paper_value;
  double computed = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  bool operator==(const ReportRow&) const = default;
};

// Row whose pass flag is |computed - reference| <= tolerance.
ReportRow compare_row(const std::string& experiment, const std::string& quantity, double reference,
                      double computed, double tolerance);
// Row without a reference value; `pass` is decided by the caller (bounds, flags).
ReportRow check_row(const std::string& experiment, const std::string& quantity, double computed, double tolerance,
                    bool pass);

void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows);
nlohmann::json report_to_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> report_from_json(const nlohmann::json& j);
std::vector<ReportRow> parse_report_csv(const std::string& text);
bool all_pass(const std::vector<ReportRow>& rows);

struct GridConfig {
  int n_t = 0;  // 0 lets each experiment choose
  int n_x = 0;
  double t_min = 0.0, t_max = 0.0;
  double x_min = 0.0, x_max = 0.0;

  bool operator==(const GridConfig&) const = default;
};

struct SolverConfig {
  double dt = 0.0;  // 0 lets each experiment choose
  int steps = 0;
  int K = 8;
  std::string method = "fourier";

  bool operator==(const SolverConfig&) const = default;
};

struct OutputConfig {
  std::string directory = ".";
  std::vector<std::string> formats{"csv"};

  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  std::vector<std::string> experiments;
  double theta = 0.1;
  double mass = 1.0;
  double omega = 1.0;
  double sigma = 1.0;
  GridConfig grid;
  SolverConfig solver;
  OutputConfig output;

  bool operator==(const ExperimentConfig&) const = default;

  // Throws InvalidInput for unknown experiments or out-of-range parameters.
  void validate() const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  // key = value lines; '#' starts a comment; nested keys use dots (grid.n_x, solver.dt, output.formats).
  std::string to_flat() const;
  static ExperimentConfig from_flat(const std::string& text);
  // JSON when the text starts with '{', flat otherwise.
  static ExperimentConfig parse(const std::string& text);
};

const std::vector<std::string>& registered_experiments();

struct ReferenceValue {
  std::string key;
  double value;
  std::string meaning;
};

// Literal values quoted by the source formulas, one entry per checked quantity.
const std::vector<ReferenceValue>& reference_values();
double reference(const std::string& key);

}  // namespace ncqm

#include "ncqm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "ncqm/fieldgrid.hpp"

namespace ncqm {

namespace {

// RFC 4180: quote fields holding a comma, quote or line break.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> f(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        f.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        f.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      f.emplace_back();
    } else {
      f.back() += c;
    }
  }
  if (quoted) throw InvalidInput("report CSV: unterminated quote in " + line);
  return f;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidInput("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) throw InvalidInput("config key '" + key + "' expects an integer, got '" + v + "'");
  return static_cast<int>(d);
}

}  // namespace

ReportRow compare_row(const std::string& experiment, const std::string& quantity, double reference,
                      double computed, double tolerance) {
  return {experiment, quantity, reference, computed, tolerance,
          std::isfinite(computed) && std::abs(computed - reference) <= tolerance};
}

ReportRow check_row(const std::string& experiment, const std::string& quantity, double computed, double tolerance,
                    bool pass) {
  return {experiment, quantity, std::nullopt, computed, tolerance, pass};
}

void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "experiment,quantity,paper_value,computed,tolerance,pass\n";
  for (const auto& r : rows) {
    os << csv_field(r.experiment) << ',' << csv_field(r.quantity) << ',' << (r.paper_value ? format_number(*r.paper_value) : "") << ','
       << format_number(r.computed) << ',' << format_number(r.tolerance) << ',' << (r.pass ? "true" : "false")
       << '\n';
  }
}

nlohmann::json report_to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"experiment", r.experiment}, {"quantity", r.quantity}, {"paper_value", nullptr},
                     {"computed", r.computed},     {"tolerance", r.tolerance}, {"pass", r.pass}};
    if (r.paper_value) j["paper_value"] = *r.paper_value;
    arr.push_back(j);
  }
  return arr;
}

std::vector<ReportRow> report_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidInput("report JSON must be an array");
  std::vector<ReportRow> rows;
  for (const auto& e : j) {
    ReportRow r;
    r.experiment = e.at("experiment").get<std::string>();
    r.quantity = e.at("quantity").get<std::string>();
    if (e.contains("paper_value") && !e["paper_value"].is_null()) r.paper_value = e["paper_value"].get<double>();
    r.computed = e.at("computed").get<double>();
    r.tolerance = e.at("tolerance").get<double>();
    r.pass = e.at("pass").get<bool>();
    rows.push_back(r);
  }
  return rows;
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || trim(line) != "experiment,quantity,paper_value,computed,tolerance,pass")
    throw InvalidInput("report CSV header mismatch");
  std::vector<ReportRow> rows;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    for (auto& item : f) item = trim(item);
    if (f.size() != 6) throw InvalidInput("report CSV row needs 6 fields: " + line);
    ReportRow r;
    r.experiment = f[0];
    r.quantity = f[1];
    if (!f[2].empty()) r.paper_value = to_double("paper_value", f[2]);
    r.computed = to_double("computed", f[3]);
    r.tolerance = to_double("tolerance", f[4]);
    r.pass = f[5] == "true";
    rows.push_back(r);
  }
  return rows;
}

bool all_pass(const std::vector<ReportRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

const std::vector<std::string>& registered_experiments() {
  static const std::vector<std::string> names{"star-check", "free-packet", "oscillator", "moments",
                                              "ehrenfest",  "transition",  "galilean",   "symplectic"};
  return names;
}

void ExperimentConfig::validate() const {
  const auto& reg = registered_experiments();
  for (const auto& e : experiments)
    if (std::find(reg.begin(), reg.end(), e) == reg.end()) throw InvalidInput("unknown experiment '" + e + "'");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw InvalidInput("theta must be finite and >= 0");
  if (!(mass > 0.0)) throw InvalidInput("m must be positive");
  if (!(omega > 0.0)) throw InvalidInput("omega must be positive");
  if (!(sigma >= 0.0)) throw InvalidInput("sigma must be >= 0");
  if (grid.n_t < 0 || grid.n_x < 0) throw InvalidInput("grid sizes must be >= 0");
  if ((grid.n_t && !is_power_of_two(grid.n_t)) || (grid.n_x && !is_power_of_two(grid.n_x)))
    throw InvalidInput("grid sizes must be powers of two");
  if (grid.x_max < grid.x_min || grid.t_max < grid.t_min) throw InvalidInput("grid extents are inverted");
  if (solver.dt < 0.0 || solver.steps < 0 || solver.K < 1) throw InvalidInput("solver needs dt >= 0, steps >= 0, K >= 1");
  if (solver.method != "fourier" && solver.method != "series")
    throw InvalidInput("solver.method must be 'fourier' or 'series'");
  for (const auto& f : output.formats)
    if (f != "csv" && f != "json") throw InvalidInput("output format must be csv or json, got '" + f + "'");
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"experiments", experiments},
          {"theta", theta},
          {"m", mass},
          {"omega", omega},
          {"sigma", sigma},
          {"grid",
           {{"n_t", grid.n_t},
            {"n_x", grid.n_x},
            {"t_min", grid.t_min},
            {"t_max", grid.t_max},
            {"x_min", grid.x_min},
            {"x_max", grid.x_max}}},
          {"solver", {{"dt", solver.dt}, {"steps", solver.steps}, {"K", solver.K}, {"method", solver.method}}},
          {"output", {{"directory", output.directory}, {"formats", output.formats}}}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("experiment")) c.experiments = {j["experiment"].get<std::string>()};
    if (j.contains("experiments")) c.experiments = j["experiments"].get<std::vector<std::string>>();
    c.theta = j.value("theta", c.theta);
    c.mass = j.value("m", c.mass);
    c.omega = j.value("omega", c.omega);
    c.sigma = j.value("sigma", c.sigma);
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      c.grid.n_t = g.value("n_t", 0);
      c.grid.n_x = g.value("n_x", 0);
      c.grid.t_min = g.value("t_min", 0.0);
      c.grid.t_max = g.value("t_max", 0.0);
      c.grid.x_min = g.value("x_min", 0.0);
      c.grid.x_max = g.value("x_max", 0.0);
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      c.solver.dt = s.value("dt", 0.0);
      c.solver.steps = s.value("steps", 0);
      c.solver.K = s.value("K", 8);
      c.solver.method = s.value("method", std::string("fourier"));
    }
    if (j.contains("output")) {
      const auto& o = j["output"];
      c.output.directory = o.value("directory", std::string("."));
      if (o.contains("formats")) c.output.formats = o["formats"].get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("config JSON: ") + e.what());
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::to_flat() const {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "experiments = " << join(experiments) << '\n'
     << "theta = " << num(theta) << '\n'
     << "m = " << num(mass) << '\n'
     << "omega = " << num(omega) << '\n'
     << "sigma = " << num(sigma) << '\n'
     << "grid.n_t = " << grid.n_t << '\n'
     << "grid.n_x = " << grid.n_x << '\n'
     << "grid.t_min = " << num(grid.t_min) << '\n'
     << "grid.t_max = " << num(grid.t_max) << '\n'
     << "grid.x_min = " << num(grid.x_min) << '\n'
     << "grid.x_max = " << num(grid.x_max) << '\n'
     << "solver.dt = " << num(solver.dt) << '\n'
     << "solver.steps = " << solver.steps << '\n'
     << "solver.K = " << solver.K << '\n'
     << "solver.method = " << solver.method << '\n'
     << "output.directory = " << output.directory << '\n'
     << "output.formats = " << join(output.formats) << '\n';
  return os.str();
}

ExperimentConfig ExperimentConfig::from_flat(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + " lacks '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "experiment" || key == "experiments") c.experiments = split(val, ',');
    else if (key == "theta") c.theta = to_double(key, val);
    else if (key == "m") c.mass = to_double(key, val);
    else if (key == "omega") c.omega = to_double(key, val);
    else if (key == "sigma") c.sigma = to_double(key, val);
    else if (key == "grid.n_t") c.grid.n_t = to_int(key, val);
    else if (key == "grid.n_x") c.grid.n_x = to_int(key, val);
    else if (key == "grid.t_min") c.grid.t_min = to_double(key, val);
    else if (key == "grid.t_max") c.grid.t_max = to_double(key, val);
    else if (key == "grid.x_min") c.grid.x_min = to_double(key, val);
    else if (key == "grid.x_max") c.grid.x_max = to_double(key, val);
    else if (key == "solver.dt") c.solver.dt = to_double(key, val);
    else if (key == "solver.steps") c.solver.steps = to_int(key, val);
    else if (key == "solver.K") c.solver.K = to_int(key, val);
    else if (key == "solver.method") c.solver.method = val;
    else if (key == "output.directory") c.output.directory = val;
    else if (key == "output.formats") c.output.formats = split(val, ',');
    else throw InvalidInput("unknown config key '" + key + "' on line " + std::to_string(lineno));
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("config JSON: ") + e.what());
    }
    return from_json(j);
  }
  return from_flat(text);
}

const std::vector<ReferenceValue>& reference_values() {
  static const std::vector<ReferenceValue> table{
      {"star.plane_wave_factor_re", 0.9950042, "Voros factor for (E,p,E',p',theta)=(1,0,0,1,0.2), real part"},
      {"star.plane_wave_factor_im", 0.0998334, "Voros factor for (E,p,E',p',theta)=(1,0,0,1,0.2), imaginary part"},
      {"star.conjugate_pair_factor", 1.2840254, "factor for the pairing (-1,-2) with (1,2) at theta=0.1"},
      {"symbols.zero_momentum_symbol", 0.15915494, "momentum symbol at E=p=0"},
      {"symbols.prefactor_theta_0.4", 0.0965324, "momentum symbol modulus at (E,p)=(1,2), theta=0.4"},
      {"symbols.basis_coincident", 0.1591549, "coherent basis overlap at coincident points, theta=1"},
      {"symbols.basis_offset", 0.2478752, "coherent basis overlap at offset (0.5,0), theta=0.5"},
      {"packet.width_sigma1_t1", 1.1892071, "packet width, sigma=1, theta=0, m=1, t=1"},
      {"packet.width_sigma0_theta0.02", 0.1, "packet width, sigma=0, theta=0.02, t=0"},
      {"oscillator.ground_density_mean", 0.05, "ground density mean, m=omega=1, theta=0.1"},
      {"oscillator.ground_density_variance", 0.55, "ground density variance, m=omega=1, theta=0.1"},
      {"moments.x_mean", 0.0, "ground-state position mean"},
      {"moments.t_second_moment_shift", 0.055, "<T^2> - t^2 on the ground state, m=omega=1, theta=0.1"},
      {"moments.p_second_moment", 0.5, "<P_x^2> on the ground state, m=omega=1"},
      {"moments.dx_dp", 0.5, "Delta X Delta P_x on the ground state"},
      {"moments.dx_dt", 0.1658312, "Delta X Delta T on the ground state, m=omega=1, theta=0.1"},
      {"moments.de_dt", 0.0, "Delta E Delta T on a stationary state"},
      {"variance.det", 0.1875, "determinant of the coherent-state variance table"},
      {"symplectic.nu_product", 1.7320508, "product of the two symplectic eigenvalues after the map to commuting coordinates"},
      {"symplectic.vacuum_nu", 1.0, "symplectic eigenvalue of V = I/2"},
  };
  return table;
}

double reference(const std::string& key) {
  for (const auto& r : reference_values())
    if (r.key == key) return r.value;
  throw InvalidInput("no reference value named '" + key + "'");
}

}  // namespace ncqm

#include "sgdg/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sgdg/errors.hpp"

namespace sgdg {

const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids = {
      "accuracy2d", "wb2d",       "perturb2d_sym", "perturb2d_asym",
      "blast2d",    "multiblast2d", "jeans",       "accuracy3d",
      "wb3d",       "perturb3d",  "explosion3d",   "manufactured_poisson"};
  return ids;
}

ScenarioConfig scenario_defaults(const std::string& id) {
  ScenarioConfig c;
  c.scenario = id;
  if (id == "accuracy2d") {
    c.kappa = 2.0 * M_PI;
    c.G = 0.25;
    c.t_end = 0.8;
    c.meshes = {5, 10, 20, 40};
  } else if (id == "wb2d") {
    c.t_end = 5.0;
    c.meshes = {10, 20, 40};
  } else if (id == "perturb2d_sym") {
    c.mu = 0.01;
    c.t_end = 0.1;
    c.meshes = {80};
  } else if (id == "perturb2d_asym") {
    c.mu = 0.1;
    c.t_end = 0.1;
    c.meshes = {80};
  } else if (id == "blast2d") {
    c.mu = 100.0;
    c.t_end = 0.05;
    c.meshes = {100};
    c.oe = c.pp = true;
  } else if (id == "multiblast2d") {
    c.mu = 100.0;
    c.t_end = 0.02;
    c.meshes = {100};
    c.oe = c.pp = true;
  } else if (id == "jeans") {
    c.gamma = 5.0 / 3.0;
    c.rho0 = 1.0;
    c.G = 0.6674;
    c.mu = 1e-3;
    c.t_end = 2.6;
    c.meshes = {64};
    c.oe = c.pp = true;
  } else if (id == "accuracy3d") {
    c.kappa = 2.0 * M_PI;
    c.G = 1.0 / M_PI;
    c.t_end = 0.1;
    c.meshes = {4, 8, 16};
  } else if (id == "wb3d") {
    c.G = 1.0 / M_PI;
    c.t_end = 1.0;
    c.meshes = {4, 8, 16};
  } else if (id == "perturb3d") {
    c.G = 1.0 / M_PI;
    c.mu = 1e-3;
    c.t_end = 0.1;
    c.meshes = {24};
  } else if (id == "explosion3d") {
    c.G = 1.0;
    c.mu = 10.0;  // pressure amplification factor inside the hot spot
    c.t_end = 0.15;
    c.meshes = {24};
    c.oe = c.pp = true;
  } else if (id == "manufactured_poisson") {
    c.meshes = {8, 16, 32};
    c.t_end = 0.0;
  } else {
    throw ConfigError("unknown scenario id '" + id + "'");
  }
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("value '" + v + "' for key '" + key + "' is not a number");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int d = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("value '" + v + "' for key '" + key + "' is not an integer");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("value '" + v + "' for key '" + key + "' is not a boolean");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_int(key, item));
  }
  if (out.empty()) throw ConfigError("empty mesh list for key '" + key + "'");
  return out;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  // first pass: find the scenario id (section header or `scenario =` key)
  std::vector<std::pair<std::string, std::string>> entries;
  std::string scenario;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header at line " + std::to_string(lineno));
      scenario = lower(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value' at line " + std::to_string(lineno));
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "scenario") {
      scenario = lower(val);
      continue;
    }
    entries.emplace_back(key, val);
  }
  if (scenario.empty()) throw ConfigError("no scenario selected (use 'scenario = <id>' or a [section])");
  ScenarioConfig cfg = scenario_defaults(scenario);

  for (const auto& [key, val] : entries) {
    if (key == "kappa" || key == "k_pressure" || key == "k") {
      cfg.kappa = parse_double(key, val);
    } else if (key == "g") {
      cfg.G = parse_double(key, val);
    } else if (key == "lambda" || key == "rho_central") {
      cfg.lambda = parse_double(key, val);
    } else if (key == "n") {
      cfg.n = parse_int(key, val);
    } else if (key == "gamma") {
      cfg.gamma = parse_double(key, val);
    } else if (key == "rho0") {
      cfg.rho0 = parse_double(key, val);
    } else if (key == "mu" || key == "amplitude") {
      cfg.mu = parse_double(key, val);
    } else if (key == "mesh" || key == "meshes") {
      cfg.meshes = parse_int_list(key, val);
      for (int m : cfg.meshes)
        if (m < 1) throw ConfigError("mesh sizes must be positive");
    } else if (key == "degree") {
      cfg.degree = parse_int(key, val);
      if (cfg.degree < 1 || cfg.degree > 4) throw ConfigError("degree must be in 1..4");
    } else if (key == "basis") {
      const std::string b = lower(val);
      if (b == "p") cfg.trunc = BasisTrunc::TotalDegree;
      else if (b == "q") cfg.trunc = BasisTrunc::Tensor;
      else throw ConfigError("basis must be 'p' or 'q'");
    } else if (key == "scheme") {
      const std::string b = lower(val);
      if (b == "sp") cfg.scheme = SchemeKind::StructurePreserving;
      else if (b == "std") cfg.scheme = SchemeKind::Standard;
      else throw ConfigError("scheme must be 'sp' or 'std'");
    } else if (key == "rk") {
      cfg.rk_order = parse_int(key, val);
      if (cfg.rk_order < 1 || cfg.rk_order > 3) throw ConfigError("rk order must be 1, 2 or 3");
    } else if (key == "oe") {
      cfg.oe = parse_bool(key, val);
    } else if (key == "pp") {
      cfg.pp = parse_bool(key, val);
    } else if (key == "d2") {
      const std::string b = lower(val);
      if (b == "sbp") cfg.d2 = D2Variant::SBP;
      else if (b == "naive") cfg.d2 = D2Variant::Naive;
      else throw ConfigError("d2 must be 'sbp' or 'naive'");
    } else if (key == "t_end") {
      cfg.t_end = parse_double(key, val);
      if (cfg.t_end < 0.0) throw ConfigError("t_end must be nonnegative");
    } else if (key == "cfl") {
      cfg.cfl = parse_double(key, val);
      if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0) throw ConfigError("cfl must lie in (0, 1]");
    } else if (key == "pp_floor") {
      cfg.pp_floor = parse_double(key, val);
      if (!(cfg.pp_floor > 0.0)) throw ConfigError("pp_floor must be positive");
    } else if (key == "out_every") {
      cfg.out_every = parse_int(key, val);
      if (cfg.out_every < 1) throw ConfigError("out_every must be >= 1");
    } else if (key == "output_dir") {
      cfg.output_dir = val;
    } else if (key == "threads") {
      cfg.threads = parse_int(key, val);
      if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    } else if (key == "paper_scale") {
      cfg.paper_scale = parse_bool(key, val);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  return cfg;
}

std::string config_to_text(const ScenarioConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "scenario = " << c.scenario << "\n";
  os << "kappa = " << c.kappa << "\n";
  os << "g = " << c.G << "\n";
  os << "lambda = " << c.lambda << "\n";
  os << "n = " << c.n << "\n";
  os << "gamma = " << c.gamma << "\n";
  os << "rho0 = " << c.rho0 << "\n";
  os << "mu = " << c.mu << "\n";
  os << "mesh = ";
  for (size_t i = 0; i < c.meshes.size(); ++i) os << (i ? "," : "") << c.meshes[i];
  os << "\n";
  os << "degree = " << c.degree << "\n";
  os << "basis = " << (c.trunc == BasisTrunc::Tensor ? "q" : "p") << "\n";
  os << "scheme = " << (c.scheme == SchemeKind::Standard ? "std" : "sp") << "\n";
  os << "rk = " << c.rk_order << "\n";
  os << "oe = " << (c.oe ? "on" : "off") << "\n";
  os << "pp = " << (c.pp ? "on" : "off") << "\n";
  os << "d2 = " << (c.d2 == D2Variant::Naive ? "naive" : "sbp") << "\n";
  os << "t_end = " << c.t_end << "\n";
  if (c.cfl > 0.0) os << "cfl = " << c.cfl << "\n";
  os << "pp_floor = " << c.pp_floor << "\n";
  os << "out_every = " << c.out_every << "\n";
  os << "output_dir = " << c.output_dir << "\n";
  os << "threads = " << c.threads << "\n";
  os << "paper_scale = " << (c.paper_scale ? "on" : "off") << "\n";
  return os.str();
}

}  // namespace sgdg

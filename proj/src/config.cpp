#include "acs/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "acs/errors.hpp"
#include "acs/field_io.hpp"
#include "acs/fixtures.hpp"

namespace acs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_input, what + ": expected a number, got '" + s + "'");
  }
}

long parse_integer(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_input, what + ": expected an integer, got '" + s + "'");
  }
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig kv;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::parse_error, "line " + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::parse_error, "line " + std::to_string(number) + ": empty key");
    if (kv.has(key)) {
      throw Error(ErrorKind::parse_error, "line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    kv.values_[key] = value;
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

void KeyValueConfig::require_known(const std::set<std::string>& allowed) const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (allowed.count(key)) continue;
    unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (unknown.empty()) return;
  std::string valid;
  for (const auto& key : allowed) valid += (valid.empty() ? "" : ", ") + key;
  throw Error(ErrorKind::invalid_input, "unknown config keys: " + unknown + " (valid: " + valid + ")");
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_real(values_.at(key), key) : fallback;
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  return has(key) ? parse_integer(values_.at(key), key) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = values_.at(key);
  try {
    std::size_t used = 0;
    if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_input, key + ": expected an unsigned integer, got '" + s + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = values_.at(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error(ErrorKind::invalid_input, key + ": expected true or false, got '" + s + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const std::string& part : split(values_.at(key), ',')) out.push_back(parse_real(trim(part), key));
  return out;
}

MetricField parse_metric_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto bad = [&] {
    return Error(ErrorKind::invalid_input,
                 "bad metric spec '" + spec + "' (euclidean:<m>, sphere:<n>[:R=<trunc>], conformal:<field-file>)");
  };
  if (kind == "euclidean") {
    if (rest.empty()) throw bad();
    return MetricField::euclidean(static_cast<int>(parse_integer(rest, "metric dimension")));
  }
  if (kind == "sphere") {
    const auto parts = split(rest, ':');
    if (parts.empty() || parts.size() > 2 || parts[0].empty()) throw bad();
    const int n = static_cast<int>(parse_integer(parts[0], "sphere n"));
    double trunc = 50.0;
    if (parts.size() == 2) {
      if (parts[1].rfind("R=", 0) != 0) throw bad();
      trunc = parse_real(parts[1].substr(2), "truncation radius");
    }
    return MetricField::sphere_stereographic(n, trunc);
  }
  if (kind == "conformal") {
    if (rest.empty()) throw bad();
    const MatrixField gfield = read_field_file(rest);
    const Grid& grid = gfield.grid();
    const int m = grid.dim();
    std::vector<double> u(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const Matrix gp = gfield.at(p);
      const double scale = gp(0, 0);
      if (!(scale > 0)) {
        throw Error(ErrorKind::invalid_input, "conformal metric file: non-positive entry at grid index " +
                                                  std::to_string(p));
      }
      const Matrix expected = scale * Matrix::Identity(m, m);
      if (max_abs(Matrix(gp - expected)) > 1e-12 * scale) {
        throw Error(ErrorKind::invalid_input,
                    "conformal metric file: not a multiple of the identity at grid index " + std::to_string(p));
      }
      u[p] = std::log(scale);
    }
    return MetricField::conformal(sampled_exponent(grid, std::move(u), "file:" + rest));
  }
  throw bad();
}

Grid parse_grid_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  auto bad = [&] {
    return Error(ErrorKind::invalid_input,
                 "bad grid spec '" + spec + "' (torus:<m>:<cells>[:<period>], ball:<m>:<radius>:<h>)");
  };
  if (parts.empty()) throw bad();
  if (parts[0] == "torus") {
    if (parts.size() < 3 || parts.size() > 4) throw bad();
    const int m = static_cast<int>(parse_integer(parts[1], "grid dimension"));
    const int cells = static_cast<int>(parse_integer(parts[2], "grid cells"));
    const double period = parts.size() == 4 ? parse_real(parts[3], "grid period") : 1.0;
    return Grid::torus(m, cells, period);
  }
  if (parts[0] == "ball") {
    if (parts.size() != 4) throw bad();
    const int m = static_cast<int>(parse_integer(parts[1], "grid dimension"));
    return Grid::ball(m, parse_real(parts[2], "ball radius"), parse_real(parts[3], "grid spacing"));
  }
  throw bad();
}

AcsField make_initial_field(const std::string& spec, const Grid& grid, const MetricField& g, std::uint64_t seed) {
  if (grid.dim() != g.dim()) throw Error(ErrorKind::invalid_input, "grid and metric dimensions differ");
  if (spec == "j0") {
    if (grid.dim() % 2 != 0) throw Error(ErrorKind::invalid_input, "grid dimension must be even");
    return sphere_fixture(grid.dim() / 2, grid);
  }
  if (spec == "winding") return winding_field(grid);
  if (spec.rfind("perturbed:", 0) == 0) {
    return perturbed_j0(grid, parse_real(spec.substr(10), "perturbation amplitude"), seed);
  }
  if (spec.rfind("file:", 0) == 0) {
    MatrixField f = read_field_file(spec.substr(5));
    if (!f.grid().same_shape(grid)) {
      throw Error(ErrorKind::invalid_input, "initial field grid " + f.grid().describe() + " differs from " +
                                                grid.describe());
    }
    AcsField J(std::move(f));
    J.update_residuals(g);
    return J;
  }
  throw Error(ErrorKind::invalid_input,
              "bad initial field spec '" + spec + "' (j0, perturbed:<amplitude>, winding, file:<path>)");
}

const std::set<std::string>& flow_config_keys() {
  static const std::set<std::string> keys{"solver",         "dt_factor",       "max_steps",
                                          "residual_tol",   "energy_stall_tol", "stall_window",
                                          "reproject_every", "divergence_factor", "max_halvings",
                                          "unchecked",      "checkpoint_every"};
  return keys;
}

FlowConfig flow_config_from(const KeyValueConfig& kv) {
  FlowConfig cfg;
  cfg.solver = parse_solver(kv.get_string("solver", "heat"));
  cfg.dt_factor = kv.get_double("dt_factor", cfg.dt_factor);
  cfg.max_steps = kv.get_long("max_steps", cfg.max_steps);
  cfg.residual_tol = kv.get_double("residual_tol", cfg.residual_tol);
  cfg.energy_stall_tol = kv.get_double("energy_stall_tol", cfg.energy_stall_tol);
  cfg.stall_window = static_cast<int>(kv.get_long("stall_window", cfg.stall_window));
  cfg.reproject_every = static_cast<int>(kv.get_long("reproject_every", cfg.reproject_every));
  cfg.divergence_factor = kv.get_double("divergence_factor", cfg.divergence_factor);
  cfg.max_halvings = static_cast<int>(kv.get_long("max_halvings", cfg.max_halvings));
  cfg.unchecked = kv.get_bool("unchecked", cfg.unchecked);
  cfg.checkpoint_every = kv.get_long("checkpoint_every", cfg.checkpoint_every);
  cfg.validate();
  return cfg;
}

}  // namespace acs

#pragma once

// Run configuration: flat key=value text, one pair per line, '#' starts a
// comment. Spec strings for metrics, grids and initial fields.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acs/field.hpp"
#include "acs/flow.hpp"

namespace acs {

class KeyValueConfig {
 public:
  /// Throws parse_error naming the line on malformed input or duplicate keys.
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  /// Later values win (command-line overrides).
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Throws invalid_input listing every key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated reals.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

double parse_real(const std::string& s, const std::string& what);
long parse_integer(const std::string& s, const std::string& what);
std::vector<std::string> split(const std::string& s, char sep);

/// euclidean:<m> | sphere:<n>[:R=<trunc>] | conformal:<field-file>. The
/// conformal file stores the metric matrix e^u id at each grid point.
MetricField parse_metric_spec(const std::string& spec);

/// torus:<m>:<cells>[:<period>] | ball:<m>:<radius>:<h>
Grid parse_grid_spec(const std::string& spec);

/// j0 | perturbed:<amplitude> | winding | file:<path>
AcsField make_initial_field(const std::string& spec, const Grid& grid, const MetricField& g, std::uint64_t seed);

/// Flow parameters from the keys dt_factor, max_steps, residual_tol,
/// energy_stall_tol, stall_window, reproject_every, divergence_factor,
/// max_halvings, unchecked, solver, checkpoint_every.
FlowConfig flow_config_from(const KeyValueConfig& kv);
const std::set<std::string>& flow_config_keys();

}  // namespace acs

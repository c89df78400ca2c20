// acsflow: batch front end for projection, flow, diagnostics and fixtures.
//
// Exit status: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "acs/config.hpp"
#include "acs/diagnostics.hpp"
#include "acs/errors.hpp"
#include "acs/field_io.hpp"
#include "acs/fixtures.hpp"
#include "acs/flow.hpp"
#include "acs/parallel.hpp"

namespace fs = std::filesystem;
using namespace acs;

namespace {

constexpr int kUsage = 1;
constexpr int kNumerical = 2;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input:
    case ErrorKind::parse_error:
    case ErrorKind::degenerate_scale:
    case ErrorKind::unsupported_metric:
      return kUsage;
    default:
      return kNumerical;
  }
}

struct Shared {
  std::string config;
  std::string out = ".";
  std::string seed;
  std::string threads;
  std::vector<std::string> overrides;  // key=value
};

void add_shared(CLI::App* app, Shared& s) {
  app->add_option("--config", s.config, "key=value configuration file");
  app->add_option("--out", s.out, "output directory");
  app->add_option("--seed", s.seed, "random seed (u64)");
  app->add_option("--threads", s.threads, "worker threads: <n> or auto");
  app->add_option("--set", s.overrides, "override one config key (key=value); repeatable");
}

/// Config file, then --set overrides, then the dedicated flags.
KeyValueConfig load_config(const Shared& s, const std::set<std::string>& allowed) {
  KeyValueConfig kv = s.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(s.config);
  for (const std::string& o : s.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::invalid_input, "--set expects key=value, got '" + o + "'");
    kv.set(o.substr(0, eq), o.substr(eq + 1));
  }
  if (!s.seed.empty()) kv.set("seed", s.seed);
  if (!s.threads.empty()) kv.set("threads", s.threads);
  std::set<std::string> all = allowed;
  all.insert({"seed", "threads"});
  kv.require_known(all);

  const std::string threads = kv.get_string("threads", "auto");
  if (threads == "auto") {
    parallel::set_threads(static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  } else {
    const long n = parse_integer(threads, "threads");
    if (n < 1) throw Error(ErrorKind::invalid_input, "threads must be >= 1 or auto");
    parallel::set_threads(static_cast<int>(n));
  }
  return kv;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::invalid_input, "cannot create output directory " + dir);
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string point_string(const Eigen::VectorXd& x, char sep) {
  std::string s;
  for (Eigen::Index a = 0; a < x.size(); ++a) s += (a ? std::string(1, sep) : "") + format_double(x(a));
  return s;
}

std::string summary_text(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out;
  for (const auto& [k, v] : rows) out += k + ": " + v + "\n";
  return out;
}

// project

int cmd_project(const Shared& s, const std::string& in, const std::string& out, const std::string& metric_flag) {
  KeyValueConfig kv = load_config(s, {"metric"});
  if (!metric_flag.empty()) kv.set("metric", metric_flag);
  if (!kv.has("metric")) throw Error(ErrorKind::invalid_input, "project needs --metric or metric= in the config");
  const MetricField g = parse_metric_spec(kv.get_string("metric", ""));
  const MatrixField N = read_field_file(in);
  if (N.dim() != g.dim()) throw Error(ErrorKind::invalid_input, "field and metric dimensions differ");
  AcsField before(N);
  before.update_residuals(g);
  const AcsField J = project_field(N, g, ProjectionMode::strict);
  write_field_file(out, J);
  std::cout << "pre_max_constraint_residual: " << format_double(before.max_constraint_residual()) << "\n"
            << "post_max_constraint_residual: " << format_double(J.max_constraint_residual()) << "\n";
  return 0;
}

// flow

int cmd_flow(const Shared& s) {
  std::set<std::string> allowed = flow_config_keys();
  allowed.insert({"grid", "metric", "initial"});
  const KeyValueConfig kv = load_config(s, allowed);
  for (const char* key : {"grid", "metric", "initial"}) {
    if (!kv.has(key)) throw Error(ErrorKind::invalid_input, std::string("flow config is missing '") + key + "'");
  }
  FlowConfig cfg = flow_config_from(kv);
  const MetricField g = parse_metric_spec(kv.get_string("metric", ""));
  const Grid grid = parse_grid_spec(kv.get_string("grid", ""));
  const std::uint64_t seed = kv.get_u64("seed", 0);
  ensure_dir(s.out);

  const AcsField initial = make_initial_field(kv.get_string("initial", ""), grid, g, seed);
  const std::string checkpoint_path = join(s.out, "checkpoint.acsfield");
  cfg.checkpoint = [&](const FlowState& st) { write_field_file(checkpoint_path, st.field); };

  std::vector<std::pair<std::string, std::string>> summary{
      {"grid", grid.describe()},
      {"metric", g.describe()},
      {"initial", kv.get_string("initial", "")},
      {"solver", to_string(cfg.solver)},
      {"dt", format_double(flow_dt(cfg, grid, g))},
      {"stall_window", std::to_string(cfg.stall_window)},
  };
  FlowState state;
  try {
    state = run_flow(initial, g, cfg);
  } catch (const DivergenceError& err) {
    write_text_file(join(s.out, "history.csv"), history_csv(err.last_good().history));
    summary.emplace_back("status", "divergence");
    summary.emplace_back("message", err.what());
    summary.emplace_back("last_good_step", std::to_string(err.last_good().step));
    write_text_file(join(s.out, "summary.txt"), summary_text(summary));
    throw;
  }
  write_text_file(join(s.out, "history.csv"), history_csv(state.history));
  write_field_file(join(s.out, "final.acsfield"), state.field);
  const HistoryRecord& first = state.history.front();
  const HistoryRecord& last = state.history.back();
  summary.emplace_back("status", state.termination);
  summary.emplace_back("steps", std::to_string(state.step));
  summary.emplace_back("time", format_double(state.time));
  summary.emplace_back("initial_energy", format_double(first.energy));
  summary.emplace_back("final_energy", format_double(last.energy));
  summary.emplace_back("final_sup_residual", format_double(last.sup_residual));
  summary.emplace_back("final_max_constraint_residual", format_double(last.max_constraint_residual));
  write_text_file(join(s.out, "summary.txt"), summary_text(summary));
  std::cout << summary_text(summary);
  return state.termination == "step_failure" ? kNumerical : 0;
}

// diagnose

const std::vector<std::string>& diagnostic_names() {
  static const std::vector<std::string> names{"energy",     "residual",     "density_profile", "monotonicity",
                                              "homogeneity", "regularity", "epsilon_scan",    "bochner",
                                              "dim4"};
  return names;
}

std::vector<Eigen::VectorXd> parse_centers(const KeyValueConfig& kv, const Grid& grid) {
  std::vector<Eigen::VectorXd> centers;
  const int m = grid.dim();
  if (!kv.has("centers")) {
    Eigen::VectorXd c(m);
    for (int a = 0; a < m; ++a) c(a) = grid.origin()[a] + 0.5 * (grid.extent(a) - 1) * grid.spacing();
    centers.push_back(c);
    return centers;
  }
  for (const std::string& item : split(kv.get_string("centers", ""), ';')) {
    const auto coords = split(item, ',');
    if (static_cast<int>(coords.size()) != m) {
      throw Error(ErrorKind::invalid_input, "center '" + item + "' needs " + std::to_string(m) + " coordinates");
    }
    Eigen::VectorXd c(m);
    for (int a = 0; a < m; ++a) c(a) = parse_real(coords[a], "center coordinate");
    centers.push_back(c);
  }
  return centers;
}

/// Default c_n: the ratio |nabla J0|^2 / |x|^2 measured on the sphere metric.
double measured_cn(int m) {
  if (m % 2 != 0) return 0;
  const MetricField sphere = MetricField::sphere_stereographic(m / 2);
  const Matrix J0 = standard_acs<double>(m / 2);
  std::vector<double> x(m, 0.0);
  x[0] = 0.5;
  return energy_density(J0, sphere, x.data()) / 0.25;
}

int cmd_diagnose(const Shared& s, const std::string& field_path, const std::string& metric_flag,
                 const std::string& list_flag) {
  KeyValueConfig kv = load_config(
      s, {"metric", "diagnostics", "centers", "radii", "delta", "c_n", "s", "t", "epsilon", "scan_radius", "stride"});
  if (!metric_flag.empty()) kv.set("metric", metric_flag);
  if (!list_flag.empty()) kv.set("diagnostics", list_flag);
  if (!kv.has("metric")) throw Error(ErrorKind::invalid_input, "diagnose needs --metric or metric= in the config");
  if (!kv.has("diagnostics")) throw Error(ErrorKind::invalid_input, "diagnose needs a diagnostics list");

  std::vector<std::string> wanted;
  for (const std::string& name : split(kv.get_string("diagnostics", ""), ',')) {
    if (std::find(diagnostic_names().begin(), diagnostic_names().end(), name) == diagnostic_names().end()) {
      std::string valid;
      for (const auto& n : diagnostic_names()) valid += (valid.empty() ? "" : ", ") + n;
      throw Error(ErrorKind::invalid_input, "unknown diagnostic '" + name + "' (valid: " + valid + ")");
    }
    wanted.push_back(name);
  }

  const MetricField g = parse_metric_spec(kv.get_string("metric", ""));
  const MatrixField J = read_field_file(field_path);
  if (J.dim() != g.dim()) throw Error(ErrorKind::invalid_input, "field and metric dimensions differ");
  const Grid& grid = J.grid();
  const double h = grid.spacing();
  const std::vector<Eigen::VectorXd> centers = parse_centers(kv, grid);
  const std::vector<double> radii = kv.get_doubles("radii", {3 * h, 4 * h, 6 * h, 8 * h});
  const double delta = kv.get_double("delta", 0.0);
  const double c_n = kv.get_double("c_n", measured_cn(grid.dim()));
  const int stride = static_cast<int>(kv.get_long("stride", 1));
  if (stride < 1) throw Error(ErrorKind::invalid_input, "stride must be >= 1");
  for (double r : radii) {
    if (r < 3 * h) {
      throw Error(ErrorKind::degenerate_scale, "radius " + format_double(r) + " is below 3h = " + format_double(3 * h));
    }
  }
  ensure_dir(s.out);

  std::unique_ptr<DensityEvaluator> eval;
  auto evaluator = [&]() -> const DensityEvaluator& {
    if (!eval) eval = std::make_unique<DensityEvaluator>(J, g);
    return *eval;
  };

  for (const std::string& name : wanted) {
    std::ostringstream csv;
    if (name == "energy") {
      csv << "energy,p3_energy\n" << format_double(energy(J, g)) << ',' << format_double(p_energy(J, g, 3.0)) << '\n';
    } else if (name == "residual") {
      const HarmonicResidual r = harmonic_residual(J, g);
      csv << "sup_residual,commutator_sup\n" << format_double(r.sup) << ',' << format_double(r.commutator_sup) << '\n';
    } else if (name == "density_profile") {
      csv << "center,r,theta,theta_tilde\n";
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const DensityProfile prof = density_profile(evaluator(), centers[k], radii, delta, c_n);
        for (std::size_t i = 0; i < radii.size(); ++i) {
          csv << k << ',' << format_double(radii[i]) << ',' << format_double(prof.theta[i]) << ','
              << format_double(prof.theta_tilde[i]) << '\n';
        }
      }
    } else if (name == "monotonicity") {
      csv << "center,max_theta_tilde,monotone_violation\n";
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const DensityProfile prof = density_profile(evaluator(), centers[k], radii, delta, c_n);
        double peak = 0;
        for (double v : prof.theta_tilde) peak = std::max(peak, v);
        csv << k << ',' << format_double(peak) << ',' << format_double(prof.monotone_violation) << '\n';
      }
    } else if (name == "homogeneity") {
      const double s_r = kv.get_double("s", radii.front());
      const double t_r = kv.get_double("t", radii.back());
      csv << "center,s,t,W,theta_tilde_t,radial_deficit_t\n";
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const double ts = evaluator().density_tilde(centers[k], s_r, delta, c_n);
        const double tt = evaluator().density_tilde(centers[k], t_r, delta, c_n);
        const double rd = evaluator().radial_deficit(centers[k], t_r, delta, c_n);
        csv << k << ',' << format_double(s_r) << ',' << format_double(t_r) << ',' << format_double(tt - ts) << ','
            << format_double(tt) << ',' << format_double(rd) << '\n';
      }
    } else if (name == "regularity") {
      std::vector<double> scan;
      for (double r : radii)
        if (r <= 1.0) scan.push_back(r);
      const RegularityMap map = regularity_map(J, scan, stride);
      csv << "point,scale\n";
      for (std::size_t i = 0; i < map.samples.size(); ++i)
        csv << point_string(map.samples[i], ' ') << ',' << format_double(map.scale[i]) << '\n';
    } else if (name == "epsilon_scan") {
      const double r = kv.get_double("scan_radius", radii.front());
      if (r < 3 * h) throw Error(ErrorKind::degenerate_scale, "scan_radius is below 3h = " + format_double(3 * h));
      const double eps = kv.get_double("epsilon", 1.0);
      const auto points = epsilon_regularity_scan(J, g, eps, r, stride);
      std::string list;
      for (const auto& p : points) list += point_string(p, ' ') + "\n";
      write_text_file(join(s.out, "epsilon_scan_points.txt"), list);
      csv << "epsilon,scan_radius,count,tubular_volume\n"
          << format_double(eps) << ',' << format_double(r) << ',' << points.size() << ','
          << format_double(tubular_volume(points, r, grid, g)) << '\n';
    } else if (name == "bochner") {
      const BochnerReport rep = bochner_residual(J, g);
      csv << "sup_residual,fitted_c\n" << format_double(rep.sup) << ',' << format_double(rep.fitted_c) << '\n';
    } else if (name == "dim4") {
      const Dim4Reduction red = dim4_reduce(J);
      const double e = energy(J, g);
      const double d = dirichlet_energy(red.u);
      csv << "chirality,energy,dirichlet_energy,ratio\n"
          << to_string(red.chirality) << ',' << format_double(e) << ',' << format_double(d) << ','
          << format_double(d > 0 ? e / d : 0.0) << '\n';
    }
    write_text_file(join(s.out, name + ".csv"), csv.str());
  }
  return 0;
}

// fixtures

int cmd_fixtures(const Shared& s, const std::string& name) {
  ensure_dir(s.out);
  if (name == "sphere") {
    const KeyValueConfig kv = load_config(s, {"n", "h", "radius"});
    const int n = static_cast<int>(kv.get_long("n", 2));
    const double h = kv.get_double("h", 1.0 / 8);
    const double radius = kv.get_double("radius", 1.0);
    const Grid grid = Grid::ball(2 * n, radius, h);
    const MetricField g = MetricField::sphere_stereographic(n);
    const AcsField J = sphere_fixture(n, grid);
    const ScalarField dens = energy_density(J, g);
    // ratio |nabla J0|^2 / |x|^2 binned by radius (bins of width h)
    const int bins = static_cast<int>(std::ceil(radius / h));
    std::vector<double> lo(bins, INFINITY), hi(bins, -INFINITY);
    double all_lo = INFINITY, all_hi = -INFINITY;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double r = grid.point(p).norm();
      if (r < 0.1 || r > radius) continue;
      const double ratio = dens.values[p] / (r * r);
      const int b = std::min(bins - 1, static_cast<int>(r / h));
      lo[b] = std::min(lo[b], ratio);
      hi[b] = std::max(hi[b], ratio);
      all_lo = std::min(all_lo, ratio);
      all_hi = std::max(all_hi, ratio);
    }
    std::ostringstream csv;
    csv << "r_lo,r_hi,ratio_min,ratio_max\n";
    for (int b = 0; b < bins; ++b) {
      if (!std::isfinite(lo[b])) continue;
      csv << format_double(b * h) << ',' << format_double((b + 1) * h) << ',' << format_double(lo[b]) << ','
          << format_double(hi[b]) << '\n';
    }
    std::ostringstream fit;
    fit << "c_n,relative_spread\n"
        << format_double(0.5 * (all_lo + all_hi)) << ',' << format_double((all_hi - all_lo) / (0.5 * (all_lo + all_hi)))
        << '\n';
    write_field_file(join(s.out, "sphere.acsfield"), J);
    write_text_file(join(s.out, "sphere_ratio.csv"), csv.str());
    write_text_file(join(s.out, "sphere_cn_fit.csv"), fit.str());
    std::cout << fit.str();
    return 0;
  }
  if (name == "dim4-cone") {
    const KeyValueConfig kv = load_config(s, {"h", "radius", "radii"});
    const double h = kv.get_double("h", 1.0 / 16);
    const double radius = kv.get_double("radius", 1.0);
    const Grid grid = Grid::ball(4, radius, h);
    const AcsField J = homogeneous_cone(grid, hopf_map);
    const MetricField g = MetricField::euclidean(4);
    const DensityEvaluator eval(J, g);
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(4);
    const std::vector<double> radii = kv.get_doubles("radii", {0.25, 0.375, 0.5, 0.625, 0.75});
    std::ostringstream csv;
    csv << "r,theta\n";
    for (double r : radii) csv << format_double(r) << ',' << format_double(eval.density(origin, r)) << '\n';
    write_field_file(join(s.out, "dim4_cone.acsfield"), J);
    write_text_file(join(s.out, "dim4_cone_density.csv"), csv.str());
    std::cout << "max_constraint_residual: " << format_double(J.max_constraint_residual()) << "\n";
    return 0;
  }
  if (name == "s1-probe") {
    const KeyValueConfig kv = load_config(s, {"h", "eps"});
    const double h = kv.get_double("h", std::ldexp(1.0, -10));
    const std::vector<double> eps =
        kv.get_doubles("eps", {std::ldexp(1.0, -3), std::ldexp(1.0, -4), std::ldexp(1.0, -5), std::ldexp(1.0, -6),
                               std::ldexp(1.0, -7)});
    const ProbeResult res = infinite_energy_probe(eps, h);
    std::ostringstream csv;
    csv << "eps,log_inv_eps,energy,oracle\n";
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double l = std::log(1.0 / eps[i]);
      csv << format_double(eps[i]) << ',' << format_double(l) << ',' << format_double(res.energy[i]) << ','
          << format_double(2 * std::numbers::pi * l) << '\n';
    }
    std::ostringstream fit;
    fit << "slope,intercept,r_squared,oracle_slope\n"
        << format_double(res.fit.slope) << ',' << format_double(res.fit.intercept) << ','
        << format_double(res.fit.r_squared) << ',' << format_double(2 * std::numbers::pi) << '\n';
    write_text_file(join(s.out, "s1_probe.csv"), csv.str());
    write_text_file(join(s.out, "s1_probe_fit.csv"), fit.str());
    std::cout << fit.str();
    return 0;
  }
  throw Error(ErrorKind::invalid_input, "unknown fixture '" + name + "' (sphere, dim4-cone, s1-probe)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimizing almost complex structures: projection, flow, diagnostics, fixtures"};
  app.require_subcommand(1);

  Shared shared;
  std::string project_in, project_out, metric, diag_field, diag_list, fixture;

  auto* project = app.add_subcommand("project", "project a field onto compatible structures");
  project->add_option("input", project_in, "input ACSFIELD file")->required();
  project->add_option("output", project_out, "output ACSFIELD file")->required();
  project->add_option("--metric", metric, "metric spec");
  add_shared(project, shared);

  auto* flow = app.add_subcommand("flow", "run the constrained heat flow");
  add_shared(flow, shared);

  auto* diagnose = app.add_subcommand("diagnose", "evaluate diagnostics on a field");
  diagnose->add_option("field", diag_field, "ACSFIELD file")->required();
  diagnose->add_option("--metric", metric, "metric spec");
  diagnose->add_option("--diagnostics", diag_list, "comma-separated diagnostic names");
  add_shared(diagnose, shared);

  auto* fixtures = app.add_subcommand("fixtures", "write an analytic fixture and its reference measurements");
  fixtures->add_option("name", fixture, "sphere | dim4-cone | s1-probe")->required();
  add_shared(fixtures, shared);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*project) return cmd_project(shared, project_in, project_out, metric);
    if (*flow) return cmd_flow(shared);
    if (*diagnose) return cmd_diagnose(shared, diag_field, metric, diag_list);
    if (*fixtures) return cmd_fixtures(shared, fixture);
  } catch (const Error& e) {
    std::cerr << "acsflow: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "acsflow: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "acs/config.hpp"
#include "acs/field_io.hpp"
#include "acs/fixtures.hpp"

using namespace acs;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::internal_error;
}

}  // namespace

TEST_CASE("key=value parsing") {
  const KeyValueConfig kv = KeyValueConfig::parse("# run\n grid = torus:4:8 \n\nmax_steps=20 # inline\nflag=yes\n");
  CHECK(kv.get_string("grid", "") == "torus:4:8");
  CHECK(kv.get_long("max_steps", 0) == 20);
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_double("missing", 1.5) == 1.5);

  try {
    KeyValueConfig::parse("a=1\nnot a pair\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse_error);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(kind_of([] { KeyValueConfig::parse("a=1\na=2\n"); }) == ErrorKind::parse_error);
  CHECK(kind_of([] { KeyValueConfig::parse("=2\n"); }) == ErrorKind::parse_error);
}

TEST_CASE("typed accessors reject malformed values") {
  KeyValueConfig kv = KeyValueConfig::parse("x=1.5e\nn=3.0\nb=maybe\nu=-4\nlist=1, 2,3.5\n");
  CHECK(kind_of([&] { kv.get_double("x", 0); }) == ErrorKind::invalid_input);
  CHECK(kind_of([&] { kv.get_long("n", 0); }) == ErrorKind::invalid_input);
  CHECK(kind_of([&] { kv.get_bool("b", false); }) == ErrorKind::invalid_input);
  CHECK(kind_of([&] { kv.get_u64("u", 0); }) == ErrorKind::invalid_input);
  CHECK(kv.get_doubles("list", {}) == std::vector<double>{1, 2, 3.5});
  kv.set("x", "2");
  CHECK(kv.get_double("x", 0) == 2.0);
  CHECK(kind_of([&] { kv.require_known({"x", "n"}); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { parse_real("nan", "v"); }) == ErrorKind::invalid_input);
}

TEST_CASE("metric and grid specs") {
  CHECK(parse_metric_spec("euclidean:4").flat());
  const MetricField s = parse_metric_spec("sphere:2:R=7.5");
  CHECK(s.dim() == 4);
  CHECK(s.truncation_radius() == 7.5);
  CHECK(parse_metric_spec("sphere:1").truncation_radius() == 50.0);
  for (const char* bad : {"euclid:4", "sphere:", "sphere:2:T=3", "euclidean:", "conformal:"})
    CHECK(kind_of([&] { parse_metric_spec(bad); }) == ErrorKind::invalid_input);

  const Grid t = parse_grid_spec("torus:4:8");
  CHECK(t.size() == 4096);
  CHECK(parse_grid_spec("torus:2:16:2.0").spacing() == 0.125);
  CHECK_FALSE(parse_grid_spec("ball:4:1:0.25").periodic());
  for (const char* bad : {"torus:4", "ball:4:1", "cube:4:8", "torus:four:8"})
    CHECK(kind_of([&] { parse_grid_spec(bad); }) == ErrorKind::invalid_input);
}

TEST_CASE("conformal metric from a field file") {
  const Grid grid = Grid::torus(2, 8);
  MatrixField gf(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Eigen::VectorXd x = grid.point(p);
    gf.at(p) = std::exp(0.2 * std::sin(2 * M_PI * x(0))) * Matrix::Identity(2, 2);
  }
  const std::string path = "test_config_metric.acsfield";
  write_field_file(path, gf);
  const MetricField g = parse_metric_spec("conformal:" + path);
  const Eigen::VectorXd x = grid.point(9);
  CHECK(g.at(x).g(0, 0) == doctest::Approx(gf.at(9)(0, 0)).epsilon(1e-12));

  gf.at(4)(0, 1) = 0.1;
  write_field_file(path, gf);
  CHECK(kind_of([&] { parse_metric_spec("conformal:" + path); }) == ErrorKind::invalid_input);
  std::remove(path.c_str());
}

TEST_CASE("initial field specs") {
  const Grid grid = Grid::torus(4, 6);
  const MetricField g = MetricField::euclidean(4);
  CHECK(make_initial_field("j0", grid, g, 1).max_constraint_residual() == 0.0);
  const AcsField a = make_initial_field("perturbed:0.3", grid, g, 5);
  const AcsField b = make_initial_field("perturbed:0.3", grid, g, 5);
  CHECK(a.values() == b.values());
  CHECK(a.values() != make_initial_field("perturbed:0.3", grid, g, 6).values());
  CHECK(make_initial_field("winding", grid, g, 1).max_constraint_residual() <= 1e-13);
  CHECK(kind_of([&] { make_initial_field("perturbed:1.5", grid, g, 1); }) == ErrorKind::invalid_input);
  CHECK(kind_of([&] { make_initial_field("spiral", grid, g, 1); }) == ErrorKind::invalid_input);

  const std::string path = "test_config_initial.acsfield";
  write_field_file(path, a);
  CHECK(make_initial_field("file:" + path, grid, g, 0).values() == a.values());
  CHECK(kind_of([&] { make_initial_field("file:" + path, Grid::torus(4, 8), g, 0); }) == ErrorKind::invalid_input);
  std::remove(path.c_str());
}

TEST_CASE("flow configuration from keys") {
  const KeyValueConfig kv =
      KeyValueConfig::parse("solver=projected_gradient\ndt_factor=0.1\nmax_steps=5\nstall_window=7\nunchecked=false\n");
  kv.require_known(flow_config_keys());
  const FlowConfig cfg = flow_config_from(kv);
  CHECK(cfg.solver == Solver::projected_gradient);
  CHECK(cfg.dt_factor == 0.1);
  CHECK(cfg.max_steps == 5);
  CHECK(cfg.stall_window == 7);
  CHECK(kind_of([] { flow_config_from(KeyValueConfig::parse("dt_factor=0.5\n")); }) == ErrorKind::invalid_input);
  CHECK_NOTHROW(flow_config_from(KeyValueConfig::parse("dt_factor=0.5\nunchecked=true\n")));
}

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "acs/field.hpp"
#include "acs/field_io.hpp"
#include "acs/fixtures.hpp"

using namespace acs;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double c : v) x(i++) = c;
  return x;
}

double max_abs_diff(const MatrixField& a, const MatrixField& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.values().size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  return d;
}

// integral over the unit torus of |d phi|^2 for phi = 2 pi x + 0.3 sin(2 pi x), times 4 for the lift
const double kWindingEnergy = 16 * M_PI * M_PI * (1 + 0.09 / 2);

}  // namespace

TEST_CASE("constant J0 on a flat torus is a zero-energy critical point") {
  const Grid grid = Grid::torus(4, 6);
  const MetricField g = MetricField::euclidean(4);
  const AcsField J = sphere_fixture(2, grid);
  CHECK(energy(J, g) == 0.0);
  const HarmonicResidual r = harmonic_residual(J, g);
  CHECK(r.sup == 0.0);
  CHECK(r.commutator_sup == 0.0);
  CHECK(J.max_constraint_residual() == 0.0);
}

TEST_CASE("sphere density of J0 is c_n |x|^2") {
  // c_n = 8(n - 1) from the symbolic oracle in tests/oracles
  const double expected[3] = {0.0, 8.0, 16.0};
  for (int n = 1; n <= 3; ++n) {
    const MetricField g = MetricField::sphere_stereographic(n);
    const Matrix J0 = standard_acs<double>(n);
    for (int k = 1; k <= 5; ++k) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
      x(0) = 0.2 * k;
      x(2 * n - 1) = -0.1 * k;
      CHECK(energy_density(J0, g, x.data()) == doctest::Approx(expected[n - 1] * x.squaredNorm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("energy of the winding field converges at second order") {
  const MetricField g = MetricField::euclidean(4);
  double err[2];
  int i = 0;
  for (int cells : {8, 16}) {
    const AcsField J = winding_field(Grid::torus(4, cells));
    CHECK(J.max_constraint_residual() <= 1e-13);
    err[i++] = std::abs(energy(J, g) - kWindingEnergy);
  }
  CHECK(err[1] < 0.1 * kWindingEnergy);
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("weak residual is minus the L2 pairing with the harmonic residual") {
  SUBCASE("flat torus") {
    const Grid grid = Grid::torus(4, 6);
    const MetricField g = MetricField::euclidean(4);
    const AcsField J = perturbed_j0(grid, 0.3, 11);
    const HarmonicResidual R = harmonic_residual(J, g);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const MatrixField T = random_test_field(grid, seed);
      const double w = weak_residual(J, g, T);
      const double pair = l2_inner(R.field, T, g);
      CHECK(std::abs(w + pair) <= 1e-10 * (1 + std::abs(w)));
    }
  }
  SUBCASE("sphere metric on a ball with T vanishing on the frozen layer") {
    const Grid grid = Grid::ball(4, 0.5, 0.125);
    const MetricField g = MetricField::sphere_stereographic(2);
    const AcsField J = project_field(perturbed_j0(grid, 0.2, 5), g, ProjectionMode::nearest);
    const HarmonicResidual R = harmonic_residual(J, g);
    MatrixField T = random_test_field(grid, 9);
    for (std::size_t p = 0; p < grid.size(); ++p)
      if (!grid.is_interior(p)) T.at(p).setZero();
    const double w = weak_residual(J, g, T);
    const double pair = l2_inner(R.field, T, g);
    CHECK(std::abs(w) > 1e-5);
    CHECK(std::abs(w + pair) <= 1e-10 * (1 + std::abs(w)));
  }
}

TEST_CASE("normal part of the harmonic residual vanishes at second order") {
  // Delta J - J nabla J nabla J is tangent in the continuum; the discrete
  // product rule only holds to O(h^2)
  const MetricField g = MetricField::euclidean(4);
  double ratio[2];
  int i = 0;
  for (int cells : {8, 16}) {
    const AcsField J = winding_field(Grid::torus(4, cells));
    const HarmonicResidual R = harmonic_residual(J, g);
    double normal = 0;
    for (std::size_t p = 0; p < J.points(); ++p) {
      const Matrix r = R.field.at(p);
      const Matrix j = J.at(p);
      normal = std::max(normal, (j * r + r * j).cwiseAbs().maxCoeff());
    }
    CHECK(R.sup > 1.0);
    ratio[i++] = normal / R.sup;
  }
  CHECK(std::log2(ratio[0] / ratio[1]) >= 1.8);
}

TEST_CASE("pointwise norm and w12 norm") {
  const Grid grid = Grid::torus(2, 8);
  const MetricField g = MetricField::euclidean(2);
  const AcsField J = sphere_fixture(1, grid);
  for (double v : pointwise_norm_squared(J, g).values) CHECK(v == doctest::Approx(2.0));
  // |J0|^2 = 2 on a unit torus, no derivative
  CHECK(w12_norm(J, g) == doctest::Approx(std::sqrt(2.0)));
  CHECK(l2_inner(J, J, g) == doctest::Approx(2.0));
}

TEST_CASE("p-energy of a constant field") {
  const MetricField g = MetricField::euclidean(4);
  const ConstantField c{Grid::torus(4, 4), standard_acs<double>(2)};
  CHECK(p_energy(c, g, 2.0) == 0.0);
  CHECK(p_energy(c, g, 3.0) == 0.0);
  const AcsField J = winding_field(Grid::torus(4, 16));
  CHECK(p_energy(J, g, 2.0) == doctest::Approx(energy(J, g)).epsilon(1e-12));
  CHECK_THROWS_AS(p_energy(J, g, 0.5), Error);
}

TEST_CASE("projection of fields") {
  const Grid grid = Grid::torus(2, 4);
  const MetricField g = MetricField::euclidean(2);
  MatrixField N = MatrixField::constant(grid, Matrix::Zero(2, 2));
  SUBCASE("strict mode names the offending grid index") {
    N = MatrixField::constant(grid, standard_acs<double>(1));
    N.at(5)(0, 0) = 0.5;
    try {
      project_field(N, g, ProjectionMode::strict);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain_error);
      CHECK(std::string(e.what()).find("5") != std::string::npos);
    }
  }
  SUBCASE("nearest mode repairs small noise") {
    N = MatrixField::constant(grid, standard_acs<double>(1));
    for (std::size_t p = 0; p < grid.size(); ++p) N.at(p)(0, 0) = 0.01 * static_cast<double>(p % 3);
    const AcsField J = project_field(N, g, ProjectionMode::nearest);
    CHECK(J.max_constraint_residual() <= 1e-14);
  }
}

TEST_CASE("interpolation is exact for affine fields") {
  const Grid grid = Grid(2, {5, 5}, 0.25, {0, 0}, Boundary::dirichlet);
  MatrixField f(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Eigen::VectorXd x = grid.point(p);
    f.at(p) << x(0), 2 * x(1), 1 - x(0) + x(1), 3;
  }
  const double x[2] = {0.31, 0.77};
  const Matrix v = interpolate(f, x);
  CHECK(v(0, 0) == doctest::Approx(0.31));
  CHECK(v(0, 1) == doctest::Approx(1.54));
  CHECK(v(1, 0) == doctest::Approx(1.46));
  CHECK(v(1, 1) == doctest::Approx(3.0));
  const double outside[2] = {1.2, 0.5};
  CHECK_THROWS_AS(interpolate(f, outside), Error);
}

TEST_CASE("dilation and radial cone of a constant field are trivial") {
  const Grid grid = Grid::ball(4, 0.5, 0.125);
  const MetricField g = MetricField::euclidean(4);
  const AcsField J = sphere_fixture(2, grid);
  const Grid unit = Grid::ball(4, 1.0, 0.25);
  const AcsField D = dilate(J, g, vec({0.05, 0, 0, 0}), 0.3, unit);
  CHECK(max_abs_diff(D, sphere_fixture(2, unit)) <= 1e-14);
  const AcsField C = radial_cone(J, g, 0.4);
  CHECK(max_abs_diff(C, J) <= 1e-14);
  CHECK_THROWS_AS(radial_cone(J, g, 0.2), Error);
  CHECK_THROWS_AS(dilate(J, g, vec({0, 0, 0, 0}), 2.0, unit), Error);
}

TEST_CASE("dilation rescales the energy density") {
  // density of J(p + r z) at z equals r^2 times the density of J at p + r z
  const Grid torus = Grid::torus(4, 16);
  const MetricField g = MetricField::euclidean(4);
  const AcsField J = winding_field(torus);
  const Grid out = Grid::torus(4, 16, 0.5);
  const AcsField D = dilate(J, g, vec({0, 0, 0, 0}), 2.0, out);
  CHECK(D.max_constraint_residual() <= 1e-12);
  // out spans the original torus exactly, so sampled values coincide
  double worst = 0;
  for (std::size_t q = 0; q < out.size(); ++q) worst = std::max(worst, (D.at(q) - J.at(q)).cwiseAbs().maxCoeff());
  CHECK(worst <= 1e-12);
  CHECK(energy(D, g) == doctest::Approx(energy(J, g) * 4.0 / 16.0).epsilon(1e-10));
}

TEST_CASE("field files round-trip and reject damage") {
  const Grid grid(3, {4, 5, 4}, 0.5, {-1.0, 0.25, 3.0}, Boundary::dirichlet);
  MatrixField f(grid);
  for (std::size_t i = 0; i < f.values().size(); ++i) f.values()[i] = std::sin(1.0 + 0.37 * i) * 1e3;
  std::stringstream buf;
  write_field(buf, f);
  const MatrixField back = read_field(buf);
  CHECK(back.grid().same_shape(grid));
  CHECK(back.values() == f.values());
  CHECK(field_header(grid) ==
        "ACSFIELD v1 m=3 extents=4,5,4 h=0.5 origin=-1,0.25,3 boundary=dirichlet");

  std::string bytes;
  {
    std::stringstream s;
    write_field(s, f);
    bytes = s.str();
  }
  SUBCASE("truncated payload") {
    std::stringstream s(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_field(s), Error);
  }
  SUBCASE("trailing bytes") {
    std::stringstream s(bytes + "x");
    CHECK_THROWS_AS(read_field(s), Error);
  }
  SUBCASE("bad magic") {
    std::stringstream s("ACSFIELD v2 m=1 extents=4 h=1 origin=0 boundary=periodic\n");
    CHECK_THROWS_AS(read_field(s), Error);
  }
  SUBCASE("header inconsistent with dimension") {
    CHECK_THROWS_AS(parse_field_header("ACSFIELD v1 m=2 extents=4 h=1 origin=0,0 boundary=periodic"), Error);
    CHECK_THROWS_AS(parse_field_header("ACSFIELD v1 m=1 extents=4 h=-1 origin=0 boundary=periodic"), Error);
  }
  SUBCASE("files") {
    const std::string path = "test_field_roundtrip.acsfield";
    write_field_file(path, f);
    CHECK(read_field_file(path).values() == f.values());
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_field_file("does/not/exist.acsfield"), Error);
  }
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
}

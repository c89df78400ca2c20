#include <doctest.h>

#include <cmath>
#include <random>

#include "acs/diagnostics.hpp"
#include "acs/fixtures.hpp"

using namespace acs;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double c : v) x(i++) = c;
  return x;
}

// J(x) = x_0 E on a Dirichlet box: central differences are exact, |DJ|^2 = |E|^2, D^2 J = 0
MatrixField linear_field(const Grid& grid, const Matrix& E) {
  MatrixField f(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) f.at(p) = grid.point(p)(0) * E;
  return f;
}

}  // namespace

TEST_CASE("density of a field with constant gradient") {
  const Grid grid = Grid::ball(2, 1.0, 1.0 / 64);
  const MetricField g = MetricField::euclidean(2);
  Matrix E(2, 2);
  E << 1, 2, 0, -1;  // |E|^2 = 6
  const MatrixField J = linear_field(grid, E);
  const DensityEvaluator eval(J, g);
  // r^{2-m} * |E|^2 * area; the lattice count converges to pi r^2
  for (double r : {0.25, 0.5}) {
    const double theta = eval.density(vec({0.1, -0.2}), r);
    CHECK(theta == doctest::Approx(6.0 * M_PI * r * r).epsilon(0.01));
  }
  CHECK(eval.density_tilde(vec({0, 0}), 0.5, 0.0, 8.0) == doctest::Approx(eval.density(vec({0, 0}), 0.5)));
  const double base = eval.density_tilde(vec({0, 0}), 0.5, 0.0, 8.0);
  CHECK(eval.density_tilde(vec({0, 0}), 0.5, 0.1, 8.0) ==
        doctest::Approx(std::exp(8.0 * 0.1 * 0.5) * (base + 8.0 * 0.01 * 0.25)));

  CHECK_THROWS_AS(eval.density(vec({0, 0}), 2.0 / 64), Error);
  try {
    eval.density(vec({0, 0}), 2.0 / 64);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_scale);
  }
  CHECK_THROWS_AS(eval.density(vec({0.8, 0}), 0.5), Error);
  CHECK_THROWS_AS(eval.density_tilde(vec({0, 0}), 0.5, -1.0, 8.0), Error);
}

TEST_CASE("density profile and monotone violation") {
  const Grid grid = Grid::ball(2, 1.0, 1.0 / 32);
  const MetricField g = MetricField::euclidean(2);
  const MatrixField J = linear_field(grid, Matrix::Identity(2, 2));
  // in two dimensions the normalized density of a constant gradient grows like r^2
  const DensityProfile prof = density_profile(J, g, vec({0, 0}), {0.1, 0.2, 0.4, 0.8}, 0.0, 0.0);
  REQUIRE(prof.theta.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) CHECK(prof.theta_tilde[i] > prof.theta_tilde[i - 1]);
  CHECK(prof.monotone_violation == 0.0);
  CHECK(homogeneity_gap(J, g, vec({0, 0}), 0.2, 0.4, 0.0, 0.0) ==
        doctest::Approx(prof.theta_tilde[2] - prof.theta_tilde[1]));
  CHECK_THROWS_AS(density_profile(J, g, vec({0, 0}), {0.2, 0.1}, 0.0, 0.0), Error);
  CHECK_THROWS_AS(homogeneity_gap(J, g, vec({0, 0}), 0.4, 0.2, 0.0, 0.0), Error);
}

TEST_CASE("normalized density of the Hopf cone") {
  // |du|^2 = 8/|x|^2 for the Hopf cone, so |DJ|^2 = 32/|x|^2 and theta = 32 pi^2 at every radius
  const double continuum = 32 * M_PI * M_PI;
  const MetricField g = MetricField::euclidean(4);
  const Grid coarse = Grid::ball(4, 0.5, 1.0 / 16);
  const Grid fine = Grid::ball(4, 0.25, 1.0 / 32);
  const AcsField Jc = homogeneous_cone(coarse, hopf_map);
  const AcsField Jf = homogeneous_cone(fine, hopf_map);
  const DensityEvaluator ec(Jc, g);
  const DensityEvaluator ef(Jf, g);
  // the discrete cone is exactly self-similar: theta depends on r/h only
  for (double r : {0.2, 0.3, 0.4}) CHECK(ec.density(vec({0, 0, 0, 0}), r) == doctest::Approx(ef.density(vec({0, 0, 0, 0}), r / 2)).epsilon(1e-12));
  // and approaches the continuum value from below as r/h grows
  double prev = 0;
  for (double r : {0.2, 0.3, 0.4}) {
    const double t = ec.density(vec({0, 0, 0, 0}), r);
    CHECK(t > prev);
    CHECK(t < continuum);
    prev = t;
  }
  CHECK(prev > 0.85 * continuum);
}

TEST_CASE("regularity scale of a linear field") {
  const Grid grid = Grid::ball(2, 1.0, 1.0 / 32);
  Matrix E = Matrix::Zero(2, 2);
  E(0, 1) = 2.5;  // |DJ| = 2.5, D^2 J = 0
  const MatrixField J = linear_field(grid, E);
  const DerivativeMagnitudes d = derivative_magnitudes(J);
  for (std::size_t q = 0; q < grid.size(); ++q) {
    if (!d.valid[q]) continue;
    CHECK(d.gradient[q] == doctest::Approx(2.5));
    CHECK(d.hessian[q] <= 1e-10);
  }
  const std::vector<double> radii{0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(regularity_scale(J, vec({0, 0}), radii) == 0.4);
  CHECK(regularity_scale(J, vec({0, 0}), {0.5, 0.6}) == 0.0);
  CHECK_THROWS_AS(regularity_scale(J, vec({0, 0}), {1.5}), Error);

  const RegularityMap map = regularity_map(J, radii, 8);
  CHECK_FALSE(map.samples.empty());
  for (double s : map.scale) CHECK(s == 0.4);
  CHECK(map.small_scale_set(0.4).empty());
  CHECK(map.small_scale_set(0.5).size() == map.samples.size());
}

TEST_CASE("epsilon-regularity scan and tubular volume") {
  const Grid grid = Grid::torus(4, 8);
  const MetricField g = MetricField::euclidean(4);
  const AcsField flat = sphere_fixture(2, grid);
  CHECK(epsilon_regularity_scan(flat, g, 1e-6, 0.375, 2).empty());

  const AcsField J = winding_field(grid);
  // |DJ|^2 = 4 phi'^2 >= 4 (2 pi 0.7)^2 everywhere, so any small epsilon flags every sample
  const auto all = epsilon_regularity_scan(J, g, 1e-3, 0.375, 2);
  CHECK(all.size() == 256);
  CHECK(epsilon_regularity_scan(J, g, 1e6, 0.375, 2).empty());
  CHECK_THROWS_AS(epsilon_regularity_scan(J, g, 1e-3, 0.2, 2), Error);

  // one point: the cells within r of it
  const Grid fine = Grid::torus(2, 64);
  const MetricField g2 = MetricField::euclidean(2);
  CHECK(tubular_volume({}, 0.1, fine, g2) == 0.0);
  CHECK(tubular_volume({vec({0.5, 0.5})}, 0.2, fine, g2) == doctest::Approx(M_PI * 0.04).epsilon(0.02));
  // overlapping points count each cell once
  CHECK(tubular_volume({vec({0.5, 0.5}), vec({0.5, 0.5})}, 0.2, fine, g2) ==
        tubular_volume({vec({0.5, 0.5})}, 0.2, fine, g2));
}

TEST_CASE("Bochner residual") {
  const Grid grid = Grid::torus(4, 8);
  const MetricField g = MetricField::euclidean(4);
  const BochnerReport flat = bochner_residual(sphere_fixture(2, grid), g);
  CHECK(flat.sup == 0.0);
  CHECK(flat.fitted_c == 0.0);
  CHECK_THROWS_AS(bochner_residual(sphere_fixture(2, grid), MetricField::sphere_stereographic(2)), Error);

  // the residual of a non-harmonic field is order one, and fitted_c is a valid bound
  const AcsField J = winding_field(Grid::torus(4, 16));
  const BochnerReport b = bochner_residual(J, g);
  CHECK(b.sup > 1.0);
  CHECK(std::isfinite(b.fitted_c));
  CHECK(b.fitted_c >= 0.0);
}

TEST_CASE("least-squares line fit") {
  const LinearFit f = fit_line({0, 1, 2, 3}, {1, 4, 7, 10});
  CHECK(f.slope == doctest::Approx(3.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  const LinearFit n = fit_line({0, 1, 2, 3}, {0, 1, 0, 1});
  CHECK(n.r_squared < 0.5);
  CHECK_THROWS_AS(fit_line({1}, {1}), Error);
  CHECK_THROWS_AS(fit_line({1, 1}, {1, 2}), Error);
}

TEST_CASE("four-dimensional patterns are compatible structures") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  const Matrix id = Matrix::Identity(4, 4);
  for (int k = 0; k < 50; ++k) {
    Eigen::Vector3d u(n01(rng), n01(rng), n01(rng));
    u.normalize();
    for (Chirality c : {Chirality::plus, Chirality::minus}) {
      const Matrix J = dim4_pattern(u(0), u(1), u(2), c);
      CHECK((J * J + id).cwiseAbs().maxCoeff() <= 1e-15);
      CHECK((J + J.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    // the two patterns commute and have opposite orientation
    const Matrix P = dim4_pattern(u(0), u(1), u(2), Chirality::plus);
    const Matrix M = dim4_pattern(u(0), u(1), u(2), Chirality::minus);
    CHECK((P * M - M * P).cwiseAbs().maxCoeff() <= 1e-14);
  }
  // J0 is the plus lift of (0, 1, 0)
  CHECK(dim4_pattern(0, 1, 0, Chirality::plus) == standard_acs<double>(2));
}

TEST_CASE("lift and reduce") {
  const Grid grid = Grid::torus(4, 6);
  const VectorField3 u = random_unit_field(grid, 3);
  for (Chirality c : {Chirality::plus, Chirality::minus}) {
    const AcsField J = dim4_lift(u, c);
    const Dim4Reduction r = dim4_reduce(J);
    CHECK(r.chirality == c);
    CHECK(r.u.values == u.values);
  }
  // |DJ|^2 = 4 |Du|^2 pointwise with the shared stencil
  const AcsField J = dim4_lift(u, Chirality::plus);
  const ScalarField dJ = energy_density(J, MetricField::euclidean(4));
  const ScalarField du = dirichlet_density(u);
  for (std::size_t q = 0; q < grid.size(); ++q) CHECK(dJ.values[q] == doctest::Approx(4 * du.values[q]).epsilon(1e-12));
  CHECK(energy(J, MetricField::euclidean(4)) == doctest::Approx(4 * dirichlet_energy(u)).epsilon(1e-12));

  SUBCASE("errors") {
    VectorField3 bad = u;
    bad.values[0] *= 2;
    CHECK_THROWS_AS(dim4_lift(bad, Chirality::plus), Error);
    AcsField mixed = J;
    mixed.at(3) = dim4_pattern(0, 0, 1, Chirality::minus);
    try {
      dim4_reduce(mixed);
      FAIL("expected a chirality error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::chirality);
    }
    AcsField garbage = J;
    garbage.at(2).setIdentity();
    try {
      dim4_reduce(garbage);
      FAIL("expected a reduction error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::not_reducible);
    }
  }
}

TEST_CASE("planar probe energy grows like 2 pi log(1/eps)") {
  const double h = 1.0 / 256;
  const ProbeResult p = infinite_energy_probe({1.0 / 8, 1.0 / 16, 1.0 / 32}, h);
  REQUIRE(p.energy.size() == 3);
  CHECK(p.fit.slope == doctest::Approx(2 * M_PI).epsilon(0.03));
  CHECK(p.fit.r_squared >= 0.999);
  CHECK_THROWS_AS(infinite_energy_probe({h}, h), Error);
}

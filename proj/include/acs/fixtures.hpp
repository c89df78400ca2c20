#pragma once

// Seeded and analytic test fields.

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "acs/diagnostics.hpp"
#include "acs/field.hpp"

namespace acs {

/// The constant standard structure J0 on a grid; compatible with every
/// conformal metric.
AcsField sphere_fixture(int n, const Grid& grid);

/// Smooth scalar built from a few low Fourier modes of the grid box, with
/// coefficients drawn from `rng`. Evaluate with operator().
class SmoothRandomFunction {
 public:
  SmoothRandomFunction(const Grid& grid, std::uint64_t seed, int modes = 3, int max_wavenumber = 2);
  double operator()(const double* x) const;

 private:
  struct Mode {
    std::vector<double> k;
    double amplitude;
    double phase;
  };
  int m_;
  std::vector<Mode> modes_;
};

/// J0 (id + S)(id - S)^{-1} with S a smooth field of Euclidean tangent
/// vectors at J0, scaled so max_x ||S(x)||_2 = amplitude.
AcsField perturbed_j0(const Grid& grid, double amplitude, std::uint64_t seed);

/// Smooth matrix field with max |entry| = 1; generic (not tangent).
MatrixField random_test_field(const Grid& grid, std::uint64_t seed);

/// Smooth field S(x) = tangent_projection(T(x), J(x), g(x)) / 4 for a random
/// smooth T, i.e. the orthogonal projection onto the linearized constraints.
MatrixField random_tangent_field(const MatrixField& J, const MetricField& g, std::uint64_t seed);

/// Random smooth unit-vector field normalize(e + v(x)) on a four-dimensional grid.
VectorField3 random_unit_field(const Grid& grid, std::uint64_t seed);

/// Lift of u = (cos phi, sin phi, 0), phi = 2 pi x_1 + 0.3 sin(2 pi x_1):
/// one turn around a great circle along the first axis of a unit torus.
AcsField winding_field(const Grid& grid);

/// Degree-zero homogeneous lift x -> lift(u(x/|x|)) centred at the origin.
AcsField homogeneous_cone(const Grid& grid, const std::function<Eigen::Vector3d(const Eigen::Vector4d&)>& u,
                          Chirality chirality = Chirality::plus);

/// Hopf map S^3 -> S^2, (z1, z2) -> (|z1|^2 - |z2|^2, 2 Re z1 conj(z2), 2 Im z1 conj(z2)).
Eigen::Vector3d hopf_map(const Eigen::Vector4d& x);

}  // namespace acs

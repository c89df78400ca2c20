#pragma once

// Analytic quantities evaluated on discrete fields: normalized ball energies
// and their monotone variant, homogeneity proxies, regularity scale, the
// epsilon-regularity scan, tubular volumes, the flat Bochner residual and the
// four-dimensional reduction to sphere-valued maps.

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "acs/field.hpp"

namespace acs {

/// Ball integrals of the energy density, computed once per field. Keeps a
/// reference to J, which must outlive the evaluator.
class DensityEvaluator {
 public:
  DensityEvaluator(const MatrixField& J, const MetricField& g);

  /// r^{2-m} int_{B_r(p)} |nabla J|^2 dv.
  double density(const Eigen::VectorXd& p, double r) const;
  /// e^{c_n delta r} (r^{2-m} int_{B_r(p)} |DJ|^2 dx + c_n delta^2 r^2) with
  /// flat coordinate derivatives.
  double density_tilde(const Eigen::VectorXd& p, double r, double delta, double c_n) const;
  /// e^{c_n delta r} r^{2-m} int_{dB_r(p)} |d_r J|^2 dS, flat, from a shell of
  /// width h around the sphere.
  double radial_deficit(const Eigen::VectorXd& p, double r, double delta, double c_n) const;

  const Grid& grid() const { return grid_; }

 private:
  void check_ball(const Eigen::VectorXd& p, double r) const;
  double ball_sum(const std::vector<double>& f, const Eigen::VectorXd& p, double r, bool metric_weight) const;

  Grid grid_;
  std::vector<double> covariant_;  // |nabla J|^2
  std::vector<double> flat_;       // |DJ|^2
  std::vector<double> sqrtg_;
  std::vector<unsigned char> counted_;
  const MatrixField* field_;  // for the radial derivative
};

double density(const MatrixField& J, const MetricField& g, const Eigen::VectorXd& p, double r);
double density_tilde(const MatrixField& J, const MetricField& g, const Eigen::VectorXd& p, double r, double delta,
                     double c_n);

struct DensityProfile {
  Eigen::VectorXd center;
  std::vector<double> radii;
  std::vector<double> theta;
  std::vector<double> theta_tilde;
  /// Largest drop of theta_tilde between consecutive radii (0 if nondecreasing).
  double monotone_violation = 0;
};

DensityProfile density_profile(const DensityEvaluator& eval, const Eigen::VectorXd& p, const std::vector<double>& radii,
                               double delta, double c_n);
DensityProfile density_profile(const MatrixField& J, const MetricField& g, const Eigen::VectorXd& p,
                               const std::vector<double>& radii, double delta, double c_n);

/// W(p, s, t) = density_tilde(p, t) - density_tilde(p, s).
double homogeneity_gap(const MatrixField& J, const MetricField& g, const Eigen::VectorXd& p, double s, double t,
                       double delta, double c_n);

/// |DJ| and |D^2 J| at each point, flat. The Hessian uses compact second
/// differences on the diagonal and nested central differences off it.
struct DerivativeMagnitudes {
  Grid grid;
  std::vector<double> gradient;
  std::vector<double> hessian;
  std::vector<unsigned char> valid;  // stencil fits (all points when periodic)
};
DerivativeMagnitudes derivative_magnitudes(const MatrixField& J);

/// Largest r in `radii` (each in (0, 1]) with sup_{B_r(p)} r|DJ| + r^2|D^2 J| <= 1; 0 if none.
double regularity_scale(const MatrixField& J, const Eigen::VectorXd& p, const std::vector<double>& radii);
double regularity_scale(const DerivativeMagnitudes& d, const Eigen::VectorXd& p, const std::vector<double>& radii);

struct RegularityMap {
  std::vector<Eigen::VectorXd> samples;
  std::vector<double> scale;
  /// Sample points with regularity scale below r.
  std::vector<Eigen::VectorXd> small_scale_set(double r) const;
};
/// Regularity scale on every `sample_stride`-th grid point along each axis.
RegularityMap regularity_map(const MatrixField& J, const std::vector<double>& radii, int sample_stride);

/// Sample points (every `sample_stride`-th grid point whose ball fits the
/// domain) where density(x, r) >= epsilon.
std::vector<Eigen::VectorXd> epsilon_regularity_scan(const MatrixField& J, const MetricField& g, double epsilon,
                                                     double r, int sample_stride = 1);

/// Volume of grid cells whose centre lies within r of the point set.
double tubular_volume(const std::vector<Eigen::VectorXd>& points, double r, const Grid& grid, const MetricField& g);

struct BochnerReport {
  ScalarField residual;  // 1/2 Delta|DJ|^2 - |D^2 J|^2 + |D_p J D_p J|^2
  double sup = 0;
  /// Smallest C with Delta u >= -C (u^2 + sqrt u), u = |DJ|^2, over valid points.
  double fitted_c = 0;
};
/// Flat metrics only.
BochnerReport bochner_residual(const MatrixField& J, const MetricField& g);

/// Least-squares slope and coefficient of determination of y against x.
struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Four-dimensional reduction.

enum class Chirality { plus, minus };
const char* to_string(Chirality c);

/// The two sign patterns of Euclidean-compatible structures on R^4 in terms
/// of a unit vector (a, b, c).
Matrix dim4_pattern(double a, double b, double c, Chirality chirality);

/// Three components per grid point.
struct VectorField3 {
  Grid grid;
  std::vector<double> values;
  Eigen::Map<const Eigen::Vector3d> at(std::size_t p) const { return Eigen::Map<const Eigen::Vector3d>(values.data() + 3 * p); }
};

AcsField dim4_lift(const VectorField3& u, Chirality chirality);

struct Dim4Reduction {
  VectorField3 u;
  Chirality chirality = Chirality::plus;
};
Dim4Reduction dim4_reduce(const MatrixField& J);

/// Flat |Du|^2 with the same central differences as covariant_derivative.
ScalarField dirichlet_density(const VectorField3& u);
double dirichlet_energy(const VectorField3& u);

// Calibration probe for the planar map x/|x|.

struct ProbeResult {
  std::vector<double> eps;
  std::vector<double> energy;
  LinearFit fit;  // energy against log(1/eps)
};
/// Flat Dirichlet energy of x/|x| over the annuli eps <= |x| <= 1, sampled on
/// a cell-centred planar grid of spacing h.
ProbeResult infinite_energy_probe(const std::vector<double>& eps, double h);

}  // namespace acs

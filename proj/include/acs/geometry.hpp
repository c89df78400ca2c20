#pragma once

// Metrics on chart domains. Every metric provided here is conformally flat,
// g = e^u * id, with analytic derivatives of u up to third order.

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "acs/grid.hpp"
#include "acs/matalg.hpp"

namespace acs {

/// Conformal exponent u with derivatives. Arrays are row-major:
/// hessian[a*m + b], third[(a*m + b)*m + c].
class ConformalExponent {
 public:
  virtual ~ConformalExponent() = default;
  virtual int dim() const = 0;
  virtual double value(const double* x) const = 0;
  virtual void gradient(const double* x, double* du) const = 0;
  virtual void hessian(const double* x, double* d2u) const = 0;
  virtual void third(const double* x, double* d3u) const = 0;
  virtual std::string describe() const = 0;
};

/// u = log 4 - 2 log(1 + |x|^2), the stereographic chart of the round sphere.
std::shared_ptr<const ConformalExponent> sphere_exponent(int m);
std::shared_ptr<const ConformalExponent> constant_exponent(int m, double c);

/// u from user callbacks. Missing higher derivatives are treated as zero.
struct ExponentCallbacks {
  std::function<double(const double*)> value;
  std::function<void(const double*, double*)> gradient;
  std::function<void(const double*, double*)> hessian;
  std::function<void(const double*, double*)> third;
};
std::shared_ptr<const ConformalExponent> callback_exponent(int m, ExponentCallbacks callbacks, std::string name);

/// u sampled on a grid. Derivatives come from second-order differences of the
/// samples; off-node values use multilinear interpolation.
std::shared_ptr<const ConformalExponent> sampled_exponent(const Grid& grid, std::vector<double> samples,
                                                          std::string name = "sampled");

enum class MetricKind { euclidean, sphere_stereographic, conformal };

class MetricField {
 public:
  static MetricField euclidean(int m);
  /// Round metric 4/(1+|x|^2)^2 on R^{2n}. Integrals are truncated to the
  /// ball |x| <= truncation_radius.
  static MetricField sphere_stereographic(int n, double truncation_radius = 50.0);
  static MetricField conformal(std::shared_ptr<const ConformalExponent> u);

  MetricKind kind() const { return kind_; }
  int dim() const { return m_; }
  bool flat() const { return kind_ == MetricKind::euclidean; }
  double truncation_radius() const { return truncation_; }
  const ConformalExponent* exponent() const { return u_.get(); }
  std::string describe() const;

  double u(const double* x) const { return u_ ? u_->value(x) : 0.0; }
  void du(const double* x, double* out) const;

  MetricAtPoint<double> at(const Eigen::VectorXd& x) const;
  double sqrt_det(const Eigen::VectorXd& x) const;
  /// dg[(a*m + i)*m + j] = d_a g_ij.
  std::vector<double> dg(const Eigen::VectorXd& x) const;
  std::vector<double> d2g(const Eigen::VectorXd& x) const;
  std::vector<double> d3g(const Eigen::VectorXd& x) const;
  /// Closed conformal form; gamma[(k*m + i)*m + j] = Gamma^k_ij.
  std::vector<double> christoffel(const Eigen::VectorXd& x) const;

 private:
  MetricKind kind_ = MetricKind::euclidean;
  int m_ = 0;
  double truncation_ = std::numeric_limits<double>::infinity();
  std::shared_ptr<const ConformalExponent> u_;
};

/// Levi-Civita formula 1/2 g^{kl}(d_i g_jl + d_j g_il - d_l g_ij) from the
/// analytic metric derivative.
std::vector<double> christoffel(const MetricField& g, const Eigen::VectorXd& x);
/// Same formula with d g replaced by central differences of step `step`.
std::vector<double> christoffel_finite_difference(const MetricField& g, const Eigen::VectorXd& x, double step);

struct ClosenessReport {
  double delta_metric = 0;
  double delta_dg = 0;
  double delta_d2g = 0;
  bool satisfied = true;
  double delta() const { return std::max(delta_metric, std::max(delta_dg, delta_d2g)); }
};

/// Samples the near-Euclidean bounds
///   (1 - d|y|^2) <= g_hat(y) <= (1 + d|y|^2),  |d g_hat| <= d|y|,  |d^2 g_hat| + |d^3 g_hat| <= d
/// for the metric rescaled to the unit ball, g_hat(y) = g(p + rho*y) / e^{u(p)},
/// on a lattice of samples_per_axis^m points of the unit ball.
ClosenessReport closeness_check(const MetricField& g, const Eigen::VectorXd& center, double radius, double delta,
                                int samples_per_axis = 9);

/// Per-point conformal data of a metric on the points of one grid.
struct GridMetric {
  bool flat = true;
  int m = 0;
  std::vector<double> u;   // size N (empty when flat)
  std::vector<double> du;  // size N*m (empty when flat)
  /// Quadrature mask: 1 inside the truncation ball, else 0 (empty: all ones).
  std::vector<unsigned char> inside;

  double exp_u(std::size_t i) const;
  double sqrt_det(std::size_t i) const;
  bool integrates(std::size_t i) const { return inside.empty() || inside[i] != 0; }
};

GridMetric sample_metric(const MetricField& g, const Grid& grid);

}  // namespace acs

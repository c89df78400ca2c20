#pragma once

// Grid sweeps shared by the field, flow and diagnostics modules. Arrays are
// raw point-major buffers: matrices take m*m doubles per point, derivative
// fields m*m*m.

#include <cstddef>
#include <functional>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "acs/errors.hpp"
#include "acs/geometry.hpp"
#include "acs/grid.hpp"

namespace acs::detail {

inline constexpr int kMaxDim = 32;

/// Calls f(std::integral_constant<int, M>) with M the fixed size for common
/// dimensions and Eigen::Dynamic otherwise.
template <class F>
decltype(auto) dispatch_dim(int m, F&& f) {
  switch (m) {
    case 2: return f(std::integral_constant<int, 2>{});
    case 4: return f(std::integral_constant<int, 4>{});
    case 6: return f(std::integral_constant<int, 6>{});
    case 8: return f(std::integral_constant<int, 8>{});
    default:
      if (m > kMaxDim) throw Error(ErrorKind::invalid_input, "dimension too large");
      return f(std::integral_constant<int, Eigen::Dynamic>{});
  }
}

/// Precomputed per-point weights of a conformal metric on a grid.
struct StencilContext {
  StencilContext(const Grid& grid, const GridMetric& metric);

  const Grid* grid;
  const GridMetric* metric;
  bool flat;
  std::vector<unsigned char> counted;  // enters quadrature
  std::vector<double> weight;          // e^{(m/2 - 1) u}
  std::vector<double> inv_sqrtg;       // e^{-m u / 2}
  std::vector<double> inv_g;           // e^{-u}
  std::vector<double> sqrtg;           // e^{m u / 2}

  double w(std::size_t p) const { return flat ? 1.0 : weight[p]; }
  double jacobian(std::size_t p) const { return flat ? 1.0 : sqrtg[p]; }
  double inverse_metric(std::size_t p) const { return flat ? 1.0 : inv_g[p]; }
  const double* du(std::size_t p) const { return metric->du.data() + p * grid->dim(); }
};

/// X = nabla J; density = |nabla J|^2. Either output may be null.
void derivative_pass(const StencilContext& c, const double* J, double* X, double* density);
/// Discrete rough Laplacian from X = nabla J; zero on points not counted.
void laplacian_pass(const StencilContext& c, const double* X, double* lap);
/// g^{pq} J X_p X_q at every point.
void nonlinearity_pass(const StencilContext& c, const double* J, const double* X, double* nl);
/// Delta J - nonlinearity on counted points, zero elsewhere.
void residual_pass(const StencilContext& c, const double* J, const double* X, double* R);

/// Sum over counted points of term(p) * sqrt(det g)(p) * h^m.
double quadrature(const StencilContext& c, const std::function<double(std::size_t)>& term);

/// Flat central differences of a per-point array of `width` doubles along
/// axis a (periodic wrap or one-sided at Dirichlet boundaries).
double central_difference(const Grid& grid, const double* data, int width, std::size_t p, const int* multi, int a,
                          int component);

}  // namespace acs::detail

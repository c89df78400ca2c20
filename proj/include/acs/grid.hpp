#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace acs {

enum class Boundary { periodic, dirichlet };

const char* to_string(Boundary b);
Boundary parse_boundary(const std::string& s);

/// Uniform Cartesian grid on a chart domain in R^m. Point i along an axis sits
/// at origin + i*h; points are ordered lexicographically, last axis fastest.
/// Periodic grids wrap with period extents*h. Dirichlet grids treat the outer
/// one-cell layer as frozen boundary data.
class Grid {
 public:
  Grid() = default;
  Grid(int m, std::vector<int> extents, double h, std::vector<double> origin, Boundary boundary);

  /// Flat torus [0, period)^m with `cells` points per axis.
  static Grid torus(int m, int cells, double period = 1.0);
  /// Torus with per-axis cell counts and common spacing h.
  static Grid torus(std::vector<int> extents, double h);
  /// Cell-centred Dirichlet box around the origin covering the closed ball of
  /// radius R by interior points. The origin itself is never a grid point.
  static Grid ball(int m, double radius, double h);

  int dim() const { return m_; }
  const std::vector<int>& extents() const { return extents_; }
  int extent(int axis) const { return extents_[axis]; }
  double spacing() const { return h_; }
  const std::vector<double>& origin() const { return origin_; }
  Boundary boundary() const { return boundary_; }
  bool periodic() const { return boundary_ == Boundary::periodic; }

  std::size_t size() const { return size_; }
  std::ptrdiff_t stride(int axis) const { return strides_[axis]; }
  double cell_volume() const;

  /// Multi-index of a linear index.
  void unravel(std::size_t index, int* multi) const;
  std::size_t ravel(const int* multi) const;

  double coordinate(int axis, int i) const { return origin_[axis] + h_ * i; }
  Eigen::VectorXd point(std::size_t index) const;
  void point(std::size_t index, double* x) const;

  /// Interior points are all points of a periodic grid, and all points off
  /// the outer layer of a Dirichlet grid.
  bool is_interior(std::size_t index) const;
  bool is_interior_multi(const int* multi) const;

  /// True when x lies in the box spanned by the grid points (always, when periodic).
  bool contains(const double* x) const;
  /// Displacement x - y reduced to the fundamental domain on periodic axes.
  void displacement(const double* x, const double* y, double* out) const;

  bool same_shape(const Grid& other) const;
  std::string describe() const;

 private:
  int m_ = 0;
  std::vector<int> extents_;
  double h_ = 0;
  std::vector<double> origin_;
  Boundary boundary_ = Boundary::periodic;
  std::vector<std::ptrdiff_t> strides_;
  std::size_t size_ = 0;
};

}  // namespace acs

#include "acs/grid.hpp"

#include <cmath>
#include <sstream>

#include "acs/errors.hpp"

namespace acs {

const char* to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "dirichlet"; }

Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "dirichlet") return Boundary::dirichlet;
  throw Error(ErrorKind::invalid_input, "unknown boundary policy '" + s + "'");
}

Grid::Grid(int m, std::vector<int> extents, double h, std::vector<double> origin, Boundary boundary)
    : m_(m), extents_(std::move(extents)), h_(h), origin_(std::move(origin)), boundary_(boundary) {
  if (m_ < 1) throw Error(ErrorKind::invalid_input, "grid dimension must be positive");
  if (static_cast<int>(extents_.size()) != m_ || static_cast<int>(origin_.size()) != m_) {
    throw Error(ErrorKind::invalid_input, "grid extents/origin length must equal the dimension");
  }
  if (!(h_ > 0) || !std::isfinite(h_)) throw Error(ErrorKind::invalid_input, "grid spacing must be positive");
  for (int e : extents_) {
    if (e < 4) throw Error(ErrorKind::invalid_input, "grid extents must be at least 4 per axis");
  }
  for (double o : origin_) {
    if (!std::isfinite(o)) throw Error(ErrorKind::invalid_input, "grid origin must be finite");
  }
  strides_.assign(m_, 1);
  for (int a = m_ - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * extents_[a + 1];
  size_ = static_cast<std::size_t>(strides_[0]) * extents_[0];
}

Grid Grid::torus(int m, int cells, double period) {
  if (!(period > 0)) throw Error(ErrorKind::invalid_input, "torus period must be positive");
  return Grid(m, std::vector<int>(m, cells), period / cells, std::vector<double>(m, 0.0), Boundary::periodic);
}

Grid Grid::torus(std::vector<int> extents, double h) {
  const int m = static_cast<int>(extents.size());
  return Grid(m, std::move(extents), h, std::vector<double>(m, 0.0), Boundary::periodic);
}

Grid Grid::ball(int m, double radius, double h) {
  if (!(radius > 0) || !(h > 0)) throw Error(ErrorKind::invalid_input, "ball radius and spacing must be positive");
  const int half = static_cast<int>(std::ceil(radius / h - 1e-12)) + 1;
  return Grid(m, std::vector<int>(m, 2 * half), h, std::vector<double>(m, -(half - 0.5) * h), Boundary::dirichlet);
}

double Grid::cell_volume() const { return std::pow(h_, m_); }

void Grid::unravel(std::size_t index, int* multi) const {
  for (int a = m_ - 1; a >= 0; --a) {
    multi[a] = static_cast<int>(index % extents_[a]);
    index /= extents_[a];
  }
}

std::size_t Grid::ravel(const int* multi) const {
  std::size_t index = 0;
  for (int a = 0; a < m_; ++a) index += static_cast<std::size_t>(multi[a]) * strides_[a];
  return index;
}

Eigen::VectorXd Grid::point(std::size_t index) const {
  Eigen::VectorXd x(m_);
  point(index, x.data());
  return x;
}

void Grid::point(std::size_t index, double* x) const {
  for (int a = m_ - 1; a >= 0; --a) {
    x[a] = origin_[a] + h_ * static_cast<double>(index % extents_[a]);
    index /= extents_[a];
  }
}

bool Grid::is_interior_multi(const int* multi) const {
  if (periodic()) return true;
  for (int a = 0; a < m_; ++a) {
    if (multi[a] == 0 || multi[a] == extents_[a] - 1) return false;
  }
  return true;
}

bool Grid::is_interior(std::size_t index) const {
  if (periodic()) return true;
  for (int a = m_ - 1; a >= 0; --a) {
    const auto i = static_cast<int>(index % extents_[a]);
    if (i == 0 || i == extents_[a] - 1) return false;
    index /= extents_[a];
  }
  return true;
}

bool Grid::contains(const double* x) const {
  if (periodic()) return true;
  for (int a = 0; a < m_; ++a) {
    const double lo = origin_[a];
    const double hi = origin_[a] + h_ * (extents_[a] - 1);
    const double slack = 1e-12 * h_;
    if (!(x[a] >= lo - slack && x[a] <= hi + slack)) return false;
  }
  return true;
}

void Grid::displacement(const double* x, const double* y, double* out) const {
  for (int a = 0; a < m_; ++a) {
    double d = x[a] - y[a];
    if (periodic()) {
      const double period = h_ * extents_[a];
      d -= period * std::round(d / period);
    }
    out[a] = d;
  }
}

bool Grid::same_shape(const Grid& other) const {
  return m_ == other.m_ && extents_ == other.extents_ && h_ == other.h_ && origin_ == other.origin_ &&
         boundary_ == other.boundary_;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << "m=" << m_ << " extents=";
  for (int a = 0; a < m_; ++a) os << (a ? "," : "") << extents_[a];
  os << " h=" << h_ << " boundary=" << to_string(boundary_);
  return os.str();
}

}  // namespace acs

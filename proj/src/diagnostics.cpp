#include "acs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "acs/errors.hpp"
#include "acs/parallel.hpp"
#include "field_kernels.hpp"

namespace acs {

namespace {

using detail::kMaxDim;

/// Visits grid points q with |x_q - p| <= r (periodic displacement) in a
/// fixed order: f(q, displacement, distance).
template <class F>
void for_each_in_ball(const Grid& g, const Eigen::VectorXd& p, double r, F&& f) {
  const int m = g.dim();
  const double h = g.spacing();
  int lo[kMaxDim], hi[kMaxDim], idx[kMaxDim], wrapped[kMaxDim];
  for (int a = 0; a < m; ++a) {
    lo[a] = static_cast<int>(std::ceil((p(a) - r - g.origin()[a]) / h - 1e-9));
    hi[a] = static_cast<int>(std::floor((p(a) + r - g.origin()[a]) / h + 1e-9));
    if (!g.periodic()) {
      lo[a] = std::max(lo[a], 0);
      hi[a] = std::min(hi[a], g.extent(a) - 1);
    } else if (hi[a] - lo[a] + 1 > g.extent(a)) {
      throw Error(ErrorKind::invalid_input, "ball wraps around the periodic domain");
    }
    if (hi[a] < lo[a]) return;
    idx[a] = lo[a];
  }
  double d[kMaxDim];
  const double r2 = r * r * (1 + 1e-12);
  while (true) {
    double dist2 = 0;
    for (int a = 0; a < m; ++a) {
      d[a] = g.origin()[a] + h * idx[a] - p(a);
      dist2 += d[a] * d[a];
      const int e = g.extent(a);
      wrapped[a] = ((idx[a] % e) + e) % e;
    }
    if (dist2 <= r2) f(g.ravel(wrapped), d, std::sqrt(dist2));
    int a = m - 1;
    while (a >= 0 && idx[a] == hi[a]) {
      idx[a] = lo[a];
      --a;
    }
    if (a < 0) break;
    ++idx[a];
  }
}

GridMetric flat_metric(int m) {
  GridMetric gm;
  gm.flat = true;
  gm.m = m;
  return gm;
}

double frob2(const double* a, std::size_t n) {
  double s = 0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * a[k];
  return s;
}

}  // namespace

DensityEvaluator::DensityEvaluator(const MatrixField& J, const MetricField& g) : grid_(J.grid()), field_(&J) {
  if (J.dim() != g.dim()) throw Error(ErrorKind::invalid_input, "field and metric dimensions differ");
  const std::size_t n = J.points();
  const GridMetric gm = sample_metric(g, grid_);
  const detail::StencilContext c(grid_, gm);
  covariant_.resize(n);
  detail::derivative_pass(c, J.values().data(), nullptr, covariant_.data());
  counted_ = c.counted;
  sqrtg_.resize(n);
  for (std::size_t q = 0; q < n; ++q) sqrtg_[q] = c.jacobian(q);
  if (g.flat()) {
    flat_ = covariant_;
  } else {
    const GridMetric fm = flat_metric(g.dim());
    const detail::StencilContext fc(grid_, fm);
    flat_.resize(n);
    detail::derivative_pass(fc, J.values().data(), nullptr, flat_.data());
  }
}

void DensityEvaluator::check_ball(const Eigen::VectorXd& p, double r) const {
  const int m = grid_.dim();
  const double h = grid_.spacing();
  if (p.size() != m) throw Error(ErrorKind::invalid_input, "ball centre dimension mismatch");
  if (!(r >= 3 * h * (1 - 1e-12))) {
    throw Error(ErrorKind::degenerate_scale, "radius " + std::to_string(r) + " is below 3h = " + std::to_string(3 * h));
  }
  for (int a = 0; a < m; ++a) {
    if (grid_.periodic()) {
      if (2 * r >= grid_.extent(a) * h) throw Error(ErrorKind::invalid_input, "ball exceeds the periodic cell");
    } else {
      const double lo = grid_.coordinate(a, 1);
      const double hi = grid_.coordinate(a, grid_.extent(a) - 2);
      if (p(a) - r < lo - 1e-12 || p(a) + r > hi + 1e-12) {
        throw Error(ErrorKind::invalid_input, "ball exits the domain");
      }
    }
  }
}

double DensityEvaluator::ball_sum(const std::vector<double>& f, const Eigen::VectorXd& p, double r,
                                  bool metric_weight) const {
  // cells straddling the sphere count with the fraction of their width inside it
  const double h = grid_.spacing();
  double sum = 0;
  for_each_in_ball(grid_, p, r + 0.5 * h, [&](std::size_t q, const double*, double dist) {
    if (!counted_[q]) return;
    const double w = std::min(1.0, 0.5 + (r - dist) / h);
    if (w <= 0) return;
    sum += w * (metric_weight ? f[q] * sqrtg_[q] : f[q]);
  });
  return sum * grid_.cell_volume();
}

double DensityEvaluator::density(const Eigen::VectorXd& p, double r) const {
  check_ball(p, r);
  return std::pow(r, 2.0 - grid_.dim()) * ball_sum(covariant_, p, r, true);
}

double DensityEvaluator::density_tilde(const Eigen::VectorXd& p, double r, double delta, double c_n) const {
  check_ball(p, r);
  if (!(delta >= 0)) throw Error(ErrorKind::invalid_input, "delta must be nonnegative");
  const double base = std::pow(r, 2.0 - grid_.dim()) * ball_sum(flat_, p, r, false);
  return std::exp(c_n * delta * r) * (base + c_n * delta * delta * r * r);
}

double DensityEvaluator::radial_deficit(const Eigen::VectorXd& p, double r, double delta, double c_n) const {
  const double h = grid_.spacing();
  check_ball(p, r + 0.5 * h);
  const int m = grid_.dim();
  const std::size_t s2 = static_cast<std::size_t>(m) * m;
  double sum = 0;
  int multi[kMaxDim];
  for_each_in_ball(grid_, p, r + 0.5 * h, [&](std::size_t q, const double* d, double dist) {
    if (dist < r - 0.5 * h || !counted_[q]) return;
    grid_.unravel(q, multi);
    double dr2 = 0;
    for (std::size_t k = 0; k < s2; ++k) {
      double v = 0;
      for (int a = 0; a < m; ++a) {
        v += d[a] / dist * detail::central_difference(grid_, field_->values().data(), static_cast<int>(s2), q, multi, a,
                                                      static_cast<int>(k));
      }
      dr2 += v * v;
    }
    sum += dr2;
  });
  // shell of width h approximates the sphere integral
  const double surface = sum * grid_.cell_volume() / h;
  return std::exp(c_n * delta * r) * std::pow(r, 2.0 - m) * surface;
}

double density(const MatrixField& J, const MetricField& g, const Eigen::VectorXd& p, double r) {
  return DensityEvaluator(J, g).density(p, r);
}

double density_tilde(const MatrixField& J, const MetricField& g, const Eigen::VectorXd& p, double r, double delta,
                     double c_n) {
  return DensityEvaluator(J, g).density_tilde(p, r, delta, c_n);
}

DensityProfile density_profile(const DensityEvaluator& eval, const Eigen::VectorXd& p, const std::vector<double>& radii,
                               double delta, double c_n) {
  if (radii.empty()) throw Error(ErrorKind::invalid_input, "density profile needs radii");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw Error(ErrorKind::invalid_input, "radii must be strictly increasing");
  }
  DensityProfile out;
  out.center = p;
  out.radii = radii;
  for (double r : radii) {
    out.theta.push_back(eval.density(p, r));
    out.theta_tilde.push_back(eval.density_tilde(p, r, delta, c_n));
  }
  for (std::size_t i = 1; i < radii.size(); ++i) {
    out.monotone_violation = std::max(out.monotone_violation, out.theta_tilde[i - 1] - out.theta_tilde[i]);
  }
  return out;
}

DensityProfile density_profile(const MatrixField& J, const MetricField& g, const Eigen::VectorXd& p,
                               const std::vector<double>& radii, double delta, double c_n) {
  return density_profile(DensityEvaluator(J, g), p, radii, delta, c_n);
}

double homogeneity_gap(const MatrixField& J, const MetricField& g, const Eigen::VectorXd& p, double s, double t,
                       double delta, double c_n) {
  if (!(s < t)) throw Error(ErrorKind::invalid_input, "homogeneity_gap needs s < t");
  const DensityEvaluator eval(J, g);
  return eval.density_tilde(p, t, delta, c_n) - eval.density_tilde(p, s, delta, c_n);
}

DerivativeMagnitudes derivative_magnitudes(const MatrixField& J) {
  const Grid& g = J.grid();
  const int m = g.dim();
  const std::size_t n = g.size();
  const std::size_t s2 = J.stride();
  const double h = g.spacing();
  DerivativeMagnitudes out{g, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                           std::vector<unsigned char>(n, 0)};
  const double* v = J.values().data();
  parallel::for_range(n, [&](std::size_t b, std::size_t e) {
    int multi[kMaxDim];
    std::vector<double> tmp(s2);
    for (std::size_t q = b; q < e; ++q) {
      g.unravel(q, multi);
      if (!g.is_interior_multi(multi)) continue;
      out.valid[q] = 1;
      auto shifted = [&](int a, int da, int bb, int db) {
        int idx[kMaxDim];
        std::copy(multi, multi + m, idx);
        idx[a] = (idx[a] + da + g.extent(a)) % g.extent(a);
        if (db != 0) idx[bb] = (idx[bb] + db + g.extent(bb)) % g.extent(bb);
        return v + g.ravel(idx) * s2;
      };
      double grad = 0, hess = 0;
      const double* c = v + q * s2;
      for (int a = 0; a < m; ++a) {
        const double* up = shifted(a, 1, a, 0);
        const double* dn = shifted(a, -1, a, 0);
        for (std::size_t k = 0; k < s2; ++k) {
          const double d1 = (up[k] - dn[k]) / (2 * h);
          const double d2 = (up[k] - 2 * c[k] + dn[k]) / (h * h);
          grad += d1 * d1;
          hess += d2 * d2;
        }
        for (int bb = 0; bb < m; ++bb) {
          if (bb == a) continue;
          const double* pp = shifted(a, 1, bb, 1);
          const double* pm = shifted(a, 1, bb, -1);
          const double* mp = shifted(a, -1, bb, 1);
          const double* mm = shifted(a, -1, bb, -1);
          for (std::size_t k = 0; k < s2; ++k) {
            const double d2 = (pp[k] - pm[k] - mp[k] + mm[k]) / (4 * h * h);
            hess += d2 * d2;
          }
        }
      }
      out.gradient[q] = std::sqrt(grad);
      out.hessian[q] = std::sqrt(hess);
    }
  });
  return out;
}

double regularity_scale(const DerivativeMagnitudes& d, const Eigen::VectorXd& p, const std::vector<double>& radii) {
  std::vector<double> sorted = radii;
  for (double r : sorted) {
    if (!(r > 0 && r <= 1)) throw Error(ErrorKind::invalid_input, "regularity radii must lie in (0, 1]");
  }
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (double r : sorted) {
    double worst = 0;
    for_each_in_ball(d.grid, p, r, [&](std::size_t q, const double*, double) {
      if (d.valid[q]) worst = std::max(worst, r * d.gradient[q] + r * r * d.hessian[q]);
    });
    if (worst <= 1.0) return r;
  }
  return 0.0;
}

double regularity_scale(const MatrixField& J, const Eigen::VectorXd& p, const std::vector<double>& radii) {
  return regularity_scale(derivative_magnitudes(J), p, radii);
}

std::vector<Eigen::VectorXd> RegularityMap::small_scale_set(double r) const {
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (scale[i] < r) out.push_back(samples[i]);
  return out;
}

namespace {

std::vector<std::size_t> sample_lattice(const Grid& g, int stride) {
  if (stride < 1) throw Error(ErrorKind::invalid_input, "sample stride must be >= 1");
  std::vector<std::size_t> out;
  int multi[kMaxDim];
  for (std::size_t q = 0; q < g.size(); ++q) {
    g.unravel(q, multi);
    bool keep = true;
    for (int a = 0; a < g.dim() && keep; ++a) keep = multi[a] % stride == 0;
    if (keep) out.push_back(q);
  }
  return out;
}

}  // namespace

RegularityMap regularity_map(const MatrixField& J, const std::vector<double>& radii, int sample_stride) {
  const DerivativeMagnitudes d = derivative_magnitudes(J);
  RegularityMap out;
  const auto lattice = sample_lattice(J.grid(), sample_stride);
  out.samples.resize(lattice.size());
  out.scale.resize(lattice.size());
  parallel::for_range(lattice.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      out.samples[i] = J.grid().point(lattice[i]);
      out.scale[i] = regularity_scale(d, out.samples[i], radii);
    }
  });
  return out;
}

std::vector<Eigen::VectorXd> epsilon_regularity_scan(const MatrixField& J, const MetricField& g, double epsilon,
                                                     double r, int sample_stride) {
  if (!(epsilon > 0)) throw Error(ErrorKind::invalid_input, "epsilon must be positive");
  const DensityEvaluator eval(J, g);
  const Grid& grid = J.grid();
  if (!(r >= 3 * grid.spacing() * (1 - 1e-12))) throw Error(ErrorKind::degenerate_scale, "scan radius below 3h");
  const auto lattice = sample_lattice(grid, sample_stride);
  std::vector<unsigned char> hit(lattice.size(), 0);
  parallel::for_range(lattice.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Eigen::VectorXd x = grid.point(lattice[i]);
      try {
        hit[i] = eval.density(x, r) >= epsilon ? 1 : 0;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::invalid_input) throw;  // ball does not fit: not scanned
      }
    }
  });
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    if (hit[i]) out.push_back(grid.point(lattice[i]));
  return out;
}

double tubular_volume(const std::vector<Eigen::VectorXd>& points, double r, const Grid& grid, const MetricField& g) {
  if (!(r >= 0)) throw Error(ErrorKind::invalid_input, "tubular radius must be nonnegative");
  if (points.empty()) return 0.0;
  std::vector<unsigned char> mark(grid.size(), 0);
  for (const auto& p : points) {
    if (p.size() != grid.dim()) throw Error(ErrorKind::invalid_input, "point dimension mismatch");
    for_each_in_ball(grid, p, r, [&](std::size_t q, const double*, double) { mark[q] = 1; });
  }
  const GridMetric gm = sample_metric(g, grid);
  return grid.cell_volume() * parallel::sum(grid.size(), [&](std::size_t q) { return mark[q] ? gm.sqrt_det(q) : 0.0; });
}

BochnerReport bochner_residual(const MatrixField& J, const MetricField& g) {
  if (!g.flat()) throw Error(ErrorKind::unsupported_metric, "Bochner residual is implemented for flat metrics only");
  if (J.dim() != g.dim()) throw Error(ErrorKind::invalid_input, "field and metric dimensions differ");
  const Grid& grid = J.grid();
  const int m = grid.dim();
  const std::size_t n = grid.size();
  const std::size_t s2 = J.stride();
  const double h = grid.spacing();
  const GridMetric fm = flat_metric(m);
  const detail::StencilContext c(grid, fm);
  std::vector<double> X(n * s2 * m), u(n);
  detail::derivative_pass(c, J.values().data(), X.data(), u.data());
  const DerivativeMagnitudes d = derivative_magnitudes(J);

  BochnerReport out;
  out.residual = ScalarField{grid, std::vector<double>(n, 0.0)};
  std::vector<double> lap_u(n, 0.0);
  parallel::for_range(n, [&](std::size_t b, std::size_t e) {
    int multi[kMaxDim];
    Matrix sq(m, m);
    for (std::size_t q = b; q < e; ++q) {
      if (!d.valid[q]) continue;
      grid.unravel(q, multi);
      double lap = 0;
      for (int a = 0; a < m; ++a) {
        int idx[kMaxDim];
        std::copy(multi, multi + m, idx);
        idx[a] = (multi[a] + 1) % grid.extent(a);
        const double up = u[grid.ravel(idx)];
        idx[a] = (multi[a] - 1 + grid.extent(a)) % grid.extent(a);
        const double dn = u[grid.ravel(idx)];
        lap += (up - 2 * u[q] + dn) / (h * h);
      }
      sq.setZero();
      for (int a = 0; a < m; ++a) {
        ConstMatrixMap Xa(X.data() + (q * m + a) * s2, m, m);
        sq.noalias() += Xa * Xa;
      }
      lap_u[q] = lap;
      out.residual.values[q] = 0.5 * lap - d.hessian[q] * d.hessian[q] + frob2(sq.data(), s2);
    }
  });
  out.sup = out.residual.sup();
  double c_fit = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (!d.valid[q] || !(u[q] > 0)) continue;
    const double denom = u[q] * u[q] + std::sqrt(u[q]);
    if (denom > 0 && -lap_u[q] > 0) c_fit = std::max(c_fit, -lap_u[q] / denom);
  }
  out.fitted_c = c_fit;
  return out;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::invalid_input, "fit needs >= 2 matching samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw Error(ErrorKind::invalid_input, "fit abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

const char* to_string(Chirality c) { return c == Chirality::plus ? "+" : "-"; }

Matrix dim4_pattern(double a, double b, double c, Chirality chirality) {
  Matrix J(4, 4);
  if (chirality == Chirality::plus) {
    J << 0, a, b, c,
        -a, 0, -c, b,
        -b, c, 0, -a,
        -c, -b, a, 0;
  } else {
    J << 0, a, b, c,
        -a, 0, c, -b,
        -b, -c, 0, a,
        -c, b, -a, 0;
  }
  return J;
}

AcsField dim4_lift(const VectorField3& u, Chirality chirality) {
  const Grid& g = u.grid;
  if (g.dim() != 4) throw Error(ErrorKind::invalid_input, "dim4_lift needs a four-dimensional grid");
  if (u.values.size() != 3 * g.size()) throw Error(ErrorKind::invalid_input, "vector field does not match grid");
  AcsField out{MatrixField(g)};
  std::vector<double> residual(g.size(), 0.0);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const auto v = u.at(q);
    if (!v.allFinite() || std::abs(v.squaredNorm() - 1.0) > 1e-8) {
      throw Error(ErrorKind::invalid_input, "dim4_lift: |u| != 1 at grid index " + std::to_string(q));
    }
    const Matrix J = dim4_pattern(v(0), v(1), v(2), chirality);
    out.at(q) = J;
    residual[q] = std::max(acs_residual(J), max_abs(Matrix(J + J.transpose())));
  }
  out.set_residuals(std::move(residual));
  return out;
}

Dim4Reduction dim4_reduce(const MatrixField& J) {
  const Grid& g = J.grid();
  if (g.dim() != 4) throw Error(ErrorKind::invalid_input, "dim4_reduce needs a four-dimensional field");
  Dim4Reduction out;
  out.u = VectorField3{g, std::vector<double>(3 * g.size())};
  bool seen_plus = false, seen_minus = false;
  for (std::size_t q = 0; q < g.size(); ++q) {
    const Matrix M = J.at(q);
    const double a = M(0, 1), b = M(0, 2), c = M(0, 3);
    const double tol = 1e-8;
    if (std::abs(a * a + b * b + c * c - 1.0) > tol) {
      throw Error(ErrorKind::not_reducible, "grid index " + std::to_string(q) + ": (a, b, c) is not a unit vector");
    }
    const bool plus = max_abs(Matrix(M - dim4_pattern(a, b, c, Chirality::plus))) <= tol;
    const bool minus = max_abs(Matrix(M - dim4_pattern(a, b, c, Chirality::minus))) <= tol;
    if (!plus && !minus) {
      throw Error(ErrorKind::not_reducible, "grid index " + std::to_string(q) + " matches neither pattern");
    }
    seen_plus |= plus;
    seen_minus |= minus;
    if (seen_plus && seen_minus) {
      throw Error(ErrorKind::chirality, "field mixes both chiralities (grid index " + std::to_string(q) + ")");
    }
    out.u.values[3 * q] = a;
    out.u.values[3 * q + 1] = b;
    out.u.values[3 * q + 2] = c;
  }
  out.chirality = seen_minus ? Chirality::minus : Chirality::plus;
  return out;
}

ScalarField dirichlet_density(const VectorField3& u) {
  const Grid& g = u.grid;
  ScalarField out{g, std::vector<double>(g.size())};
  parallel::for_range(g.size(), [&](std::size_t b, std::size_t e) {
    int multi[kMaxDim];
    for (std::size_t q = b; q < e; ++q) {
      g.unravel(q, multi);
      double s = 0;
      for (int a = 0; a < g.dim(); ++a)
        for (int k = 0; k < 3; ++k) {
          const double d = detail::central_difference(g, u.values.data(), 3, q, multi, a, k);
          s += d * d;
        }
      out.values[q] = s;
    }
  });
  return out;
}

double dirichlet_energy(const VectorField3& u) {
  const ScalarField d = dirichlet_density(u);
  const Grid& g = u.grid;
  return g.cell_volume() * parallel::sum(g.size(), [&](std::size_t q) { return g.is_interior(q) ? d.values[q] : 0.0; });
}

ProbeResult infinite_energy_probe(const std::vector<double>& eps, double h) {
  if (!(h > 0)) throw Error(ErrorKind::invalid_input, "probe spacing must be positive");
  ProbeResult out;
  const Grid g = Grid::ball(2, 1.0, h);
  auto field = [](double x, double y, double* v) {
    const double r = std::hypot(x, y);
    v[0] = x / r;
    v[1] = y / r;
  };
  // |Du|^2 at every cell centre, central differences of the sampled map
  const std::size_t n = g.size();
  std::vector<double> dens(n), radius(n);
  parallel::for_range(n, [&](std::size_t b, std::size_t e) {
    double x[2], up[2], dn[2];
    for (std::size_t q = b; q < e; ++q) {
      g.point(q, x);
      radius[q] = std::hypot(x[0], x[1]);
      double s = 0;
      field(x[0] + h, x[1], up);
      field(x[0] - h, x[1], dn);
      for (int k = 0; k < 2; ++k) s += std::pow((up[k] - dn[k]) / (2 * h), 2);
      field(x[0], x[1] + h, up);
      field(x[0], x[1] - h, dn);
      for (int k = 0; k < 2; ++k) s += std::pow((up[k] - dn[k]) / (2 * h), 2);
      dens[q] = s;
    }
  });
  for (double e : eps) {
    if (!(e >= 3 * h)) throw Error(ErrorKind::degenerate_scale, "annulus inner radius below 3h");
    double energy = 0;
    if (e < 1.0) {
      energy = g.cell_volume() * parallel::sum(n, [&](std::size_t q) {
                 return (radius[q] >= e && radius[q] <= 1.0) ? dens[q] : 0.0;
               });
    }
    out.eps.push_back(e);
    out.energy.push_back(energy);
  }
  if (out.eps.size() >= 2) {
    std::vector<double> logs;
    for (double e : out.eps) logs.push_back(std::log(1.0 / e));
    out.fit = fit_line(logs, out.energy);
  }
  return out;
}

}  // namespace acs

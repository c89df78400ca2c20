#include "acs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "acs/errors.hpp"
#include "acs/parallel.hpp"

namespace acs {

namespace {

class SphereExponent final : public ConformalExponent {
 public:
  explicit SphereExponent(int m) : m_(m) {}
  int dim() const override { return m_; }
  std::string describe() const override { return "log 4 - 2 log(1 + |x|^2)"; }

  double value(const double* x) const override { return std::log(4.0) - 2.0 * std::log1p(norm2(x)); }

  void gradient(const double* x, double* du) const override {
    const double s = 1.0 + norm2(x);
    for (int a = 0; a < m_; ++a) du[a] = -4.0 * x[a] / s;
  }

  void hessian(const double* x, double* d2u) const override {
    const double s = 1.0 + norm2(x);
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b) d2u[a * m_ + b] = -4.0 * (a == b) / s + 8.0 * x[a] * x[b] / (s * s);
  }

  void third(const double* x, double* d3u) const override {
    const double s = 1.0 + norm2(x);
    const double s2 = s * s;
    const double s3 = s2 * s;
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b)
        for (int c = 0; c < m_; ++c) {
          const double sym = (a == b) * x[c] + (a == c) * x[b] + (b == c) * x[a];
          d3u[(a * m_ + b) * m_ + c] = 8.0 * sym / s2 - 32.0 * x[a] * x[b] * x[c] / s3;
        }
  }

 private:
  double norm2(const double* x) const {
    double r2 = 0;
    for (int a = 0; a < m_; ++a) r2 += x[a] * x[a];
    return r2;
  }
  int m_;
};

class CallbackExponent final : public ConformalExponent {
 public:
  CallbackExponent(int m, ExponentCallbacks cb, std::string name) : m_(m), cb_(std::move(cb)), name_(std::move(name)) {
    if (!cb_.value) throw Error(ErrorKind::invalid_input, "conformal exponent needs a value callback");
  }
  int dim() const override { return m_; }
  std::string describe() const override { return name_; }
  double value(const double* x) const override { return cb_.value(x); }
  void gradient(const double* x, double* out) const override { fill(cb_.gradient, x, out, m_); }
  void hessian(const double* x, double* out) const override { fill(cb_.hessian, x, out, m_ * m_); }
  void third(const double* x, double* out) const override { fill(cb_.third, x, out, m_ * m_ * m_); }

 private:
  static void fill(const std::function<void(const double*, double*)>& f, const double* x, double* out, int n) {
    if (f) {
      f(x, out);
    } else {
      std::fill(out, out + n, 0.0);
    }
  }
  int m_;
  ExponentCallbacks cb_;
  std::string name_;
};

/// Derivatives by second-order differences at the nodes, multilinear
/// interpolation between nodes.
class SampledExponent final : public ConformalExponent {
 public:
  SampledExponent(const Grid& grid, std::vector<double> samples, std::string name)
      : grid_(grid), name_(std::move(name)) {
    if (samples.size() != grid.size()) throw Error(ErrorKind::invalid_input, "exponent samples do not match grid");
    for (double v : samples)
      if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "conformal exponent has non-finite samples");
    const int m = grid.dim();
    u_ = std::move(samples);
    du_ = differentiate(u_, 1);
    d2u_ = differentiate(du_, m);
    d3u_ = differentiate(d2u_, m * m);
  }

  int dim() const override { return grid_.dim(); }
  std::string describe() const override { return name_; }
  double value(const double* x) const override {
    double v;
    interpolate(u_, 1, x, &v);
    return v;
  }
  void gradient(const double* x, double* out) const override { interpolate(du_, grid_.dim(), x, out); }
  void hessian(const double* x, double* out) const override { interpolate(d2u_, grid_.dim() * grid_.dim(), x, out); }
  void third(const double* x, double* out) const override {
    const int m = grid_.dim();
    interpolate(d3u_, m * m * m, x, out);
  }

 private:
  // out[(p*width + c)*m + a] = d_a in[p*width + c]
  std::vector<double> differentiate(const std::vector<double>& in, int width) const {
    const int m = grid_.dim();
    const std::size_t n = grid_.size();
    std::vector<double> out(n * width * m);
    const double h = grid_.spacing();
    parallel::for_range(n, [&](std::size_t begin, std::size_t end) {
      std::vector<int> multi(m);
      for (std::size_t p = begin; p < end; ++p) {
        grid_.unravel(p, multi.data());
        for (int a = 0; a < m; ++a) {
          const int i = multi[a];
          const int e = grid_.extent(a);
          const std::ptrdiff_t s = grid_.stride(a);
          auto at = [&](int k) { return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + (k - i) * s); };
          for (int c = 0; c < width; ++c) {
            double d;
            if (grid_.periodic()) {
              const int ip = (i + 1) % e;
              const int im = (i - 1 + e) % e;
              d = (in[at(ip) * width + c] - in[at(im) * width + c]) / (2 * h);
            } else if (i == 0) {
              d = (-3 * in[at(0) * width + c] + 4 * in[at(1) * width + c] - in[at(2) * width + c]) / (2 * h);
            } else if (i == e - 1) {
              d = (3 * in[at(e - 1) * width + c] - 4 * in[at(e - 2) * width + c] + in[at(e - 3) * width + c]) / (2 * h);
            } else {
              d = (in[at(i + 1) * width + c] - in[at(i - 1) * width + c]) / (2 * h);
            }
            out[(p * width + c) * m + a] = d;
          }
        }
      }
    });
    return out;
  }

  void interpolate(const std::vector<double>& data, int width, const double* x, double* out) const {
    const int m = grid_.dim();
    if (!grid_.contains(x)) throw Error(ErrorKind::invalid_input, "point outside the sampled conformal exponent");
    std::vector<int> base(m);
    std::vector<double> frac(m);
    for (int a = 0; a < m; ++a) {
      const double t = (x[a] - grid_.origin()[a]) / grid_.spacing();
      const int e = grid_.extent(a);
      int i = static_cast<int>(std::floor(t));
      double f = t - i;
      if (grid_.periodic()) {
        i = ((i % e) + e) % e;
      } else {
        if (i < 0) { i = 0; f = 0; }
        if (i >= e - 1) { i = e - 2; f = 1; }
      }
      base[a] = i;
      frac[a] = f;
    }
    std::fill(out, out + width, 0.0);
    std::vector<int> corner(m);
    for (int mask = 0; mask < (1 << m); ++mask) {
      double w = 1;
      for (int a = 0; a < m; ++a) {
        const bool up = (mask >> a) & 1;
        w *= up ? frac[a] : 1 - frac[a];
        corner[a] = up ? (base[a] + 1) % grid_.extent(a) : base[a];
      }
      if (w == 0) continue;
      const std::size_t p = grid_.ravel(corner.data());
      for (int c = 0; c < width; ++c) out[c] += w * data[p * width + c];
    }
  }

  Grid grid_;
  std::string name_;
  std::vector<double> u_, du_, d2u_, d3u_;
};

class ConstantExponent final : public ConformalExponent {
 public:
  ConstantExponent(int m, double c) : m_(m), c_(c) {}
  int dim() const override { return m_; }
  std::string describe() const override { return "constant " + std::to_string(c_); }
  double value(const double*) const override { return c_; }
  void gradient(const double*, double* out) const override { std::fill(out, out + m_, 0.0); }
  void hessian(const double*, double* out) const override { std::fill(out, out + m_ * m_, 0.0); }
  void third(const double*, double* out) const override { std::fill(out, out + m_ * m_ * m_, 0.0); }

 private:
  int m_;
  double c_;
};

void require_even(int m) {
  if (m < 2 || m % 2 != 0) throw Error(ErrorKind::invalid_input, "metric dimension must be even and >= 2");
}

}  // namespace

std::shared_ptr<const ConformalExponent> sphere_exponent(int m) { return std::make_shared<SphereExponent>(m); }

std::shared_ptr<const ConformalExponent> constant_exponent(int m, double c) {
  return std::make_shared<ConstantExponent>(m, c);
}

std::shared_ptr<const ConformalExponent> callback_exponent(int m, ExponentCallbacks callbacks, std::string name) {
  return std::make_shared<CallbackExponent>(m, std::move(callbacks), std::move(name));
}

std::shared_ptr<const ConformalExponent> sampled_exponent(const Grid& grid, std::vector<double> samples,
                                                          std::string name) {
  return std::make_shared<SampledExponent>(grid, std::move(samples), std::move(name));
}

MetricField MetricField::euclidean(int m) {
  require_even(m);
  MetricField g;
  g.kind_ = MetricKind::euclidean;
  g.m_ = m;
  return g;
}

MetricField MetricField::sphere_stereographic(int n, double truncation_radius) {
  if (n < 1) throw Error(ErrorKind::invalid_input, "sphere dimension n must be >= 1");
  if (!(truncation_radius > 0)) throw Error(ErrorKind::invalid_input, "truncation radius must be positive");
  MetricField g;
  g.kind_ = MetricKind::sphere_stereographic;
  g.m_ = 2 * n;
  g.truncation_ = truncation_radius;
  g.u_ = sphere_exponent(2 * n);
  return g;
}

MetricField MetricField::conformal(std::shared_ptr<const ConformalExponent> u) {
  if (!u) throw Error(ErrorKind::invalid_input, "conformal metric needs an exponent");
  require_even(u->dim());
  MetricField g;
  g.kind_ = MetricKind::conformal;
  g.m_ = u->dim();
  g.u_ = std::move(u);
  return g;
}

std::string MetricField::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case MetricKind::euclidean: os << "euclidean:" << m_; break;
    case MetricKind::sphere_stereographic: os << "sphere:" << m_ / 2 << ":R=" << truncation_; break;
    case MetricKind::conformal: os << "conformal(" << u_->describe() << ")"; break;
  }
  return os.str();
}

void MetricField::du(const double* x, double* out) const {
  if (u_) {
    u_->gradient(x, out);
  } else {
    std::fill(out, out + m_, 0.0);
  }
}

MetricAtPoint<double> MetricField::at(const Eigen::VectorXd& x) const {
  if (x.size() != m_) throw Error(ErrorKind::invalid_input, "point dimension does not match metric");
  if (!u_) return MetricAtPoint<double>::identity(m_);
  const double e = std::exp(u_->value(x.data()));
  const double r = std::exp(0.5 * u_->value(x.data()));
  const auto id = SquareMatrix<double>::Identity(m_, m_);
  return {e * id, id / e, r * id, id / r};
}

double MetricField::sqrt_det(const Eigen::VectorXd& x) const {
  return u_ ? std::exp(0.5 * m_ * u_->value(x.data())) : 1.0;
}

std::vector<double> MetricField::dg(const Eigen::VectorXd& x) const {
  const int m = m_;
  std::vector<double> out(m * m * m, 0.0);
  if (!u_) return out;
  std::vector<double> du(m);
  u_->gradient(x.data(), du.data());
  const double e = std::exp(u_->value(x.data()));
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < m; ++i) out[(a * m + i) * m + i] = e * du[a];
  return out;
}

std::vector<double> MetricField::d2g(const Eigen::VectorXd& x) const {
  const int m = m_;
  std::vector<double> out(m * m * m * m, 0.0);
  if (!u_) return out;
  std::vector<double> du(m), d2u(m * m);
  u_->gradient(x.data(), du.data());
  u_->hessian(x.data(), d2u.data());
  const double e = std::exp(u_->value(x.data()));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double v = e * (d2u[a * m + b] + du[a] * du[b]);
      for (int i = 0; i < m; ++i) out[((a * m + b) * m + i) * m + i] = v;
    }
  return out;
}

std::vector<double> MetricField::d3g(const Eigen::VectorXd& x) const {
  const int m = m_;
  std::vector<double> out(m * m * m * m * m, 0.0);
  if (!u_) return out;
  std::vector<double> du(m), d2u(m * m), d3u(m * m * m);
  u_->gradient(x.data(), du.data());
  u_->hessian(x.data(), d2u.data());
  u_->third(x.data(), d3u.data());
  const double e = std::exp(u_->value(x.data()));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        // d_c [e^u (u_ab + u_a u_b)]
        const double v = e * (d3u[(a * m + b) * m + c] + d2u[a * m + c] * du[b] + du[a] * d2u[b * m + c] +
                              du[c] * (d2u[a * m + b] + du[a] * du[b]));
        for (int i = 0; i < m; ++i) out[(((a * m + b) * m + c) * m + i) * m + i] = v;
      }
  return out;
}

std::vector<double> MetricField::christoffel(const Eigen::VectorXd& x) const {
  const int m = m_;
  std::vector<double> gamma(m * m * m, 0.0);
  if (!u_) return gamma;
  std::vector<double> du(m);
  u_->gradient(x.data(), du.data());
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        gamma[(k * m + i) * m + j] = 0.5 * ((i == k) * du[j] + (j == k) * du[i] - (i == j) * du[k]);
      }
  return gamma;
}

namespace {

std::vector<double> levi_civita(const SquareMatrix<double>& g_inv, const std::vector<double>& dg, int m) {
  std::vector<double> gamma(m * m * m, 0.0);
  auto d = [&](int a, int i, int j) { return dg[(a * m + i) * m + j]; };
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int l = 0; l < m; ++l) s += g_inv(k, l) * (d(i, j, l) + d(j, i, l) - d(l, i, j));
        gamma[(k * m + i) * m + j] = 0.5 * s;
      }
  return gamma;
}

}  // namespace

std::vector<double> christoffel(const MetricField& g, const Eigen::VectorXd& x) {
  return levi_civita(g.at(x).g_inv, g.dg(x), g.dim());
}

std::vector<double> christoffel_finite_difference(const MetricField& g, const Eigen::VectorXd& x, double step) {
  if (!(step > 0)) throw Error(ErrorKind::invalid_input, "difference step must be positive");
  const int m = g.dim();
  std::vector<double> dg(m * m * m, 0.0);
  for (int a = 0; a < m; ++a) {
    Eigen::VectorXd xp = x, xm = x;
    xp(a) += step;
    xm(a) -= step;
    const SquareMatrix<double> diff = (g.at(xp).g - g.at(xm).g) / (2 * step);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) dg[(a * m + i) * m + j] = diff(i, j);
  }
  return levi_civita(g.at(x).g_inv, dg, m);
}

ClosenessReport closeness_check(const MetricField& g, const Eigen::VectorXd& center, double radius, double delta,
                                int samples_per_axis) {
  if (!(delta > 0)) throw Error(ErrorKind::invalid_input, "closeness_check: delta must be positive");
  if (!(radius > 0)) throw Error(ErrorKind::invalid_input, "closeness_check: radius must be positive");
  if (samples_per_axis < 2) throw Error(ErrorKind::invalid_input, "closeness_check: need at least 2 samples per axis");
  const int m = g.dim();
  if (center.size() != m) throw Error(ErrorKind::invalid_input, "closeness_check: center dimension mismatch");
  ClosenessReport report;
  if (g.flat()) {
    report.satisfied = true;
    return report;
  }
  const double u0 = g.u(center.data());
  const double scale = std::exp(-u0);
  std::size_t total = 1;
  for (int a = 0; a < m; ++a) total *= samples_per_axis;
  std::vector<int> multi(m);
  Eigen::VectorXd y(m), x(m);
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t rest = s;
    for (int a = m - 1; a >= 0; --a) {
      multi[a] = static_cast<int>(rest % samples_per_axis);
      rest /= samples_per_axis;
      y(a) = -1.0 + 2.0 * multi[a] / (samples_per_axis - 1);
    }
    const double ny2 = y.squaredNorm();
    if (ny2 > 1.0 + 1e-12) continue;
    x = center + radius * y;
    if (ny2 > 0) {
      // g_hat is a multiple of the identity: one eigenvalue.
      const double lambda = std::exp(g.u(x.data()) - u0);
      report.delta_metric = std::max(report.delta_metric, std::abs(lambda - 1.0) / ny2);
      const auto dg = g.dg(x);
      double n1 = 0;
      for (double v : dg) n1 += v * v;
      report.delta_dg = std::max(report.delta_dg, radius * scale * std::sqrt(n1) / std::sqrt(ny2));
    }
    const auto d2 = g.d2g(x);
    const auto d3 = g.d3g(x);
    double n2 = 0, n3 = 0;
    for (double v : d2) n2 += v * v;
    for (double v : d3) n3 += v * v;
    const double r2 = radius * radius;
    report.delta_d2g = std::max(report.delta_d2g, scale * (r2 * std::sqrt(n2) + r2 * radius * std::sqrt(n3)));
  }
  report.satisfied = report.delta_metric <= delta && report.delta_dg <= delta && report.delta_d2g <= delta;
  return report;
}

double GridMetric::exp_u(std::size_t i) const { return flat ? 1.0 : std::exp(u[i]); }

double GridMetric::sqrt_det(std::size_t i) const { return flat ? 1.0 : std::exp(0.5 * m * u[i]); }

GridMetric sample_metric(const MetricField& g, const Grid& grid) {
  if (g.dim() != grid.dim()) throw Error(ErrorKind::invalid_input, "metric and grid dimensions differ");
  GridMetric out;
  out.m = g.dim();
  out.flat = g.flat();
  const std::size_t n = grid.size();
  const int m = out.m;
  const double trunc = g.truncation_radius();
  if (std::isfinite(trunc)) out.inside.assign(n, 1);
  if (!out.flat) {
    out.u.resize(n);
    out.du.resize(n * m);
  }
  parallel::for_range(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(m);
    for (std::size_t i = begin; i < end; ++i) {
      grid.point(i, x.data());
      if (!out.flat) {
        out.u[i] = g.u(x.data());
        g.du(x.data(), &out.du[i * m]);
      }
      if (!out.inside.empty()) {
        double r2 = 0;
        for (double v : x) r2 += v * v;
        out.inside[i] = r2 <= trunc * trunc ? 1 : 0;
      }
    }
  });
  return out;
}

}  // namespace acs

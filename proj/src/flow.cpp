#include "acs/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "acs/errors.hpp"
#include "acs/field_io.hpp"
#include "acs/parallel.hpp"
#include "field_kernels.hpp"

namespace acs {

namespace {

using detail::dispatch_dim;
using detail::StencilContext;

template <int M>
using Mat = SquareMatrix<double, M>;

struct Evaluation {
  double energy = 0;
  double sup_residual = 0;
};

/// Buffers and metric weights reused across the steps of one run.
class Engine {
 public:
  Engine(const Grid& grid, const MetricField& g)
      : grid_(grid), gm_(sample_metric(g, grid)), ctx_(grid_, gm_), m_(grid.dim()) {
    const std::size_t n = grid.size();
    const std::size_t s2 = static_cast<std::size_t>(m_) * m_;
    X_.resize(n * s2 * m_);
    R_.resize(n * s2);
    density_.resize(n);
  }

  const StencilContext& context() const { return ctx_; }

  Evaluation evaluate(const MatrixField& J) {
    const double* j = J.values().data();
    detail::derivative_pass(ctx_, j, X_.data(), density_.data());
    detail::residual_pass(ctx_, j, X_.data(), R_.data());
    Evaluation ev;
    ev.energy = detail::quadrature(ctx_, [&](std::size_t p) { return density_[p]; });
    ev.sup_residual = parallel::max(R_.size(), [&](std::size_t k) { return std::abs(R_[k]); });
    return ev;
  }

  double energy(const MatrixField& J) {
    detail::derivative_pass(ctx_, J.values().data(), nullptr, density_.data());
    return detail::quadrature(ctx_, [&](std::size_t p) { return density_[p]; });
  }

  // Conformal metrics are multiples of the identity at each point, so
  // g-skewness is plain skewness and the projection needs no metric.

  /// out = P(J + dt R) on counted points (or J + dt R when !project), J elsewhere.
  void heat_update(const MatrixField& J, double dt, bool project, AcsField& out) {
    std::vector<double> residual(J.points(), 0.0);
    dispatch_dim(m_, [&](auto dim) {
      constexpr int M = decltype(dim)::value;
      const auto id = MetricAtPoint<double, M>::identity(m_);
      const std::size_t s2 = static_cast<std::size_t>(m_) * m_;
      parallel::for_range(J.points(), [&](std::size_t b, std::size_t e) {
        Mat<M> N(m_, m_);
        for (std::size_t p = b; p < e; ++p) {
          Eigen::Map<const Mat<M>> Jp(J.values().data() + p * s2, m_, m_);
          Eigen::Map<Mat<M>> Op(out.values().data() + p * s2, m_, m_);
          if (!ctx_.counted[p]) {
            Op = Jp;
          } else {
            N = Jp + dt * Eigen::Map<const Mat<M>>(R_.data() + p * s2, m_, m_);
            if (project) {
              try {
                Op = nearest_compatible(N, id);
              } catch (const Error& err) {
                throw Error(ErrorKind::divergence, "grid index " + std::to_string(p) + ": " + err.what());
              }
            } else {
              Op = N;
            }
          }
          const Mat<M> Q = Op;
          residual[p] = std::max(acs_residual(Q), max_abs(Mat<M>(Q + Q.transpose())));
        }
      });
    });
    out.set_residuals(std::move(residual));
  }

  /// Cayley retraction along the projected ambient gradient 2R, scaled so the
  /// velocity equals dt times the orthogonal tangent projection of R.
  void gradient_update(const MatrixField& J, double dt, AcsField& out) {
    std::vector<double> residual(J.points(), 0.0);
    dispatch_dim(m_, [&](auto dim) {
      constexpr int M = decltype(dim)::value;
      const auto id = MetricAtPoint<double, M>::identity(m_);
      const std::size_t s2 = static_cast<std::size_t>(m_) * m_;
      parallel::for_range(J.points(), [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
          Eigen::Map<const Mat<M>> Jp(J.values().data() + p * s2, m_, m_);
          Eigen::Map<Mat<M>> Op(out.values().data() + p * s2, m_, m_);
          if (!ctx_.counted[p]) {
            Op = Jp;
          } else {
            const Mat<M> base = Jp;
            const Mat<M> G = 2.0 * Eigen::Map<const Mat<M>>(R_.data() + p * s2, m_, m_);
            const Mat<M> S = (-dt / 16.0) * base * tangent_projection(G, base, id);
            try {
              Op = nearest_compatible(Mat<M>(cayley_chart_inv(S, base)), id);
            } catch (const Error& err) {
              throw Error(err.kind(), "grid index " + std::to_string(p) + ": " + err.what());
            }
          }
          const Mat<M> Q = Op;
          residual[p] = std::max(acs_residual(Q), max_abs(Mat<M>(Q + Q.transpose())));
        }
      });
    });
    out.set_residuals(std::move(residual));
  }

 private:
  Grid grid_;
  GridMetric gm_;
  StencilContext ctx_;
  int m_;
  std::vector<double> X_;
  std::vector<double> R_;
  std::vector<double> density_;
};

void require_constraints(const AcsField& field, const MetricField& g) {
  AcsField checked = field;
  if (checked.constraint_residual().size() != checked.points()) checked.update_residuals(g);
  if (!(checked.max_constraint_residual() <= kAcceptTol)) {
    throw Error(ErrorKind::domain_error, "flow state violates the constraints (residual " +
                                             format_double(checked.max_constraint_residual()) + ")");
  }
}

bool diverged(const Evaluation& ev, double initial_energy, double factor) {
  if (!std::isfinite(ev.energy) || !std::isfinite(ev.sup_residual)) return true;
  return initial_energy > 0 && ev.energy > factor * initial_energy;
}

/// Projected-gradient step from an evaluated state; returns false when the
/// backtracking is exhausted (out is then unspecified).
bool backtrack(Engine& engine, const AcsField& J, double energy, double dt, int max_halvings, AcsField& out,
               double& dt_used) {
  for (int k = 0; k <= max_halvings; ++k) {
    try {
      engine.gradient_update(J, dt, out);
      const double e = engine.energy(out);
      if (std::isfinite(e) && e <= energy) {
        dt_used = dt;
        return true;
      }
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::chart_out_of_range) throw;
    }
    dt *= 0.5;
  }
  return false;
}

}  // namespace

const char* to_string(Solver s) { return s == Solver::heat ? "heat" : "projected_gradient"; }

Solver parse_solver(const std::string& s) {
  if (s == "heat") return Solver::heat;
  if (s == "projected_gradient") return Solver::projected_gradient;
  throw Error(ErrorKind::invalid_input, "unknown solver '" + s + "' (heat, projected_gradient)");
}

void FlowConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::invalid_input, what); };
  if (!std::isfinite(dt_factor) || dt_factor < 0) fail("dt_factor must be a finite non-negative number");
  if (!unchecked && dt_factor > 0.25) fail("dt_factor must lie in (0, 0.25]");
  if (max_steps < 0) fail("max_steps must be >= 0");
  if (!(residual_tol > 0)) fail("residual_tol must be > 0");
  if (!(energy_stall_tol > 0)) fail("energy_stall_tol must be > 0");
  if (stall_window < 1) fail("stall_window must be >= 1");
  if (reproject_every < 1) fail("reproject_every must be >= 1");
  if (!(divergence_factor > 1)) fail("divergence_factor must be > 1");
  if (max_halvings < 0) fail("max_halvings must be >= 0");
  if (checkpoint_every < 0) fail("checkpoint_every must be >= 0");
}

double FlowConfig::effective_dt_factor(int m) const { return dt_factor > 0 ? dt_factor : 0.2 / m; }

double flow_dt(const FlowConfig& cfg, const Grid& grid, const MetricField& g) {
  const double h = grid.spacing();
  double base = cfg.effective_dt_factor(grid.dim()) * h * h;
  if (g.flat()) return base;
  // the Laplacian carries e^{-u}; scale by its largest value on updated points
  const GridMetric gm = sample_metric(g, grid);
  const StencilContext c(grid, gm);
  double min_exp = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (c.counted[p]) min_exp = std::min(min_exp, gm.exp_u(p));
  return std::isfinite(min_exp) ? base * min_exp : base;
}

FlowState flow_step(const FlowState& state, const MetricField& g, const FlowConfig& cfg) {
  cfg.validate();
  require_constraints(state.field, g);
  Engine engine(state.field.grid(), g);
  const Evaluation ev = engine.evaluate(state.field);
  if (diverged(ev, 0.0, cfg.divergence_factor)) throw DivergenceError("non-finite energy or residual", state);
  const double dt = flow_dt(cfg, state.field.grid(), g);
  FlowState next = state;
  engine.heat_update(state.field, dt, (state.step + 1) % cfg.reproject_every == 0, next.field);
  if (!next.field.all_finite()) throw DivergenceError("non-finite field after step", state);
  next.time += dt;
  next.step += 1;
  next.step_failed = false;
  return next;
}

FlowState projected_gradient_step(const FlowState& state, const MetricField& g, const FlowConfig& cfg) {
  cfg.validate();
  require_constraints(state.field, g);
  Engine engine(state.field.grid(), g);
  const Evaluation ev = engine.evaluate(state.field);
  if (diverged(ev, 0.0, cfg.divergence_factor)) throw DivergenceError("non-finite energy or residual", state);
  FlowState next = state;
  double dt_used = 0;
  if (!backtrack(engine, state.field, ev.energy, flow_dt(cfg, state.field.grid(), g), cfg.max_halvings, next.field,
                 dt_used)) {
    FlowState failed = state;
    failed.step_failed = true;
    return failed;
  }
  next.time += dt_used;
  next.step += 1;
  next.step_failed = false;
  return next;
}

FlowState run_flow(const AcsField& initial, const MetricField& g, const FlowConfig& cfg) {
  cfg.validate();
  if (initial.dim() != g.dim()) throw Error(ErrorKind::invalid_input, "field and metric dimensions differ");
  FlowState state;
  state.field = project_field(initial, g, ProjectionMode::strict);
  if (!(state.field.max_constraint_residual() <= kAcceptTol)) {
    throw Error(ErrorKind::domain_error, "initial field is not projectable");
  }

  const Grid& grid = state.field.grid();
  Engine engine(grid, g);
  const double dt = flow_dt(cfg, grid, g);
  AcsField scratch = state.field;
  FlowState last_good;
  last_good.field = state.field;
  double initial_energy = 0;
  double previous_energy = 0;
  int stall_count = 0;

  while (true) {
    const Evaluation ev = engine.evaluate(state.field);
    if (state.step == 0) initial_energy = ev.energy;
    if (diverged(ev, initial_energy, cfg.divergence_factor)) {
      if (state.step == 0) last_good = state;
      last_good.history = std::move(state.history);
      throw DivergenceError("energy " + format_double(ev.energy) + " at step " + std::to_string(state.step) +
                                " (initial " + format_double(initial_energy) + ")",
                            std::move(last_good));
    }
    state.history.push_back(
        {state.step, state.time, ev.energy, ev.sup_residual, state.field.max_constraint_residual()});
    if (cfg.checkpoint && cfg.checkpoint_every > 0 && state.step % cfg.checkpoint_every == 0) cfg.checkpoint(state);

    if (ev.sup_residual <= cfg.residual_tol) {
      state.termination = "converged";
      break;
    }
    if (state.step > 0) {
      stall_count = std::abs(ev.energy - previous_energy) <= cfg.energy_stall_tol * ev.energy ? stall_count + 1 : 0;
      if (stall_count >= cfg.stall_window) {
        state.termination = "stalled";
        break;
      }
    }
    if (state.step >= cfg.max_steps) {
      state.termination = "max_steps";
      break;
    }
    previous_energy = ev.energy;

    double dt_used = dt;
    if (cfg.solver == Solver::heat) {
      try {
        engine.heat_update(state.field, dt, (state.step + 1) % cfg.reproject_every == 0, scratch);
      } catch (const Error& err) {
        last_good = state;
        throw DivergenceError(err.what(), std::move(last_good));
      }
    } else if (!backtrack(engine, state.field, ev.energy, dt, cfg.max_halvings, scratch, dt_used)) {
      state.step_failed = true;
      state.termination = "step_failure";
      break;
    }
    // rotate buffers: pre-step field kept for a divergence report, history not copied
    std::swap(last_good.field, state.field);
    std::swap(state.field, scratch);
    last_good.time = state.time;
    last_good.step = state.step;
    state.time += dt_used;
    state.step += 1;
  }
  return state;
}

std::string history_csv(const std::vector<HistoryRecord>& history) {
  std::ostringstream out;
  out << "step,time,energy,sup_residual,max_constraint_residual\n";
  for (const HistoryRecord& r : history) {
    out << r.step << ',' << format_double(r.time) << ',' << format_double(r.energy) << ','
        << format_double(r.sup_residual) << ',' << format_double(r.max_constraint_residual) << '\n';
  }
  return out.str();
}

}  // namespace acs

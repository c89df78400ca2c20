#pragma once

// Energy minimization by the reprojected explicit heat flow
//   J <- P(J + dt (Delta J - g^{pq} J nabla_p J nabla_q J))
// with P the pointwise nearest compatible structure, and an alternative
// projected-gradient descent with Cayley retraction and backtracking.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "acs/field.hpp"

namespace acs {

enum class Solver { heat, projected_gradient };
const char* to_string(Solver s);
Solver parse_solver(const std::string& s);

struct FlowState;

struct FlowConfig {
  Solver solver = Solver::heat;
  /// dt = dt_factor * h^2 * min e^{u} over counted points; 0 selects 0.2/m.
  double dt_factor = 0.0;
  long max_steps = 10000;
  double residual_tol = 1e-6;
  double energy_stall_tol = 1e-12;
  int stall_window = 50;
  int reproject_every = 1;
  /// Energy above divergence_factor times the initial energy counts as divergence.
  double divergence_factor = 10.0;
  /// Backtracking halvings for the projected-gradient solver.
  int max_halvings = 20;
  /// Skip the dt_factor range check (stability probes only).
  bool unchecked = false;

  long checkpoint_every = 0;
  std::function<void(const FlowState&)> checkpoint;

  /// Throws invalid_input on out-of-range parameters.
  void validate() const;
  double effective_dt_factor(int m) const;
};

struct HistoryRecord {
  long step = 0;
  double time = 0;
  double energy = 0;
  double sup_residual = 0;
  double max_constraint_residual = 0;
};

struct FlowState {
  AcsField field;
  double time = 0;
  long step = 0;
  std::vector<HistoryRecord> history;
  /// Set when the projected-gradient backtracking gave up; the field is then
  /// the one before the failed step.
  bool step_failed = false;
  /// converged | stalled | max_steps | step_failure (empty while running).
  std::string termination;
};

/// Carries the last state whose energy and residual were finite and in range.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, FlowState last_good)
      : Error(ErrorKind::divergence, what), last_good_(std::move(last_good)) {}
  const FlowState& last_good() const { return last_good_; }

 private:
  FlowState last_good_;
};

/// Time step actually used for a field on `grid` under metric g.
double flow_dt(const FlowConfig& cfg, const Grid& grid, const MetricField& g);

/// One explicit heat-flow step. Dirichlet layers and points outside the
/// metric's truncation ball are frozen. Appends no history.
FlowState flow_step(const FlowState& state, const MetricField& g, const FlowConfig& cfg);

/// One projected-gradient step with backtracking.
FlowState projected_gradient_step(const FlowState& state, const MetricField& g, const FlowConfig& cfg);

/// Projects `initial` (strictly, so it must already square to -id to 1e-8)
/// and iterates the configured solver until the sup harmonic residual drops
/// to residual_tol, the energy stalls for stall_window consecutive steps, or
/// max_steps is reached. History holds one record per visited state.
FlowState run_flow(const AcsField& initial, const MetricField& g, const FlowConfig& cfg);

/// step,time,energy,sup_residual,max_constraint_residual with 17 significant digits.
std::string history_csv(const std::vector<HistoryRecord>& history);

}  // namespace acs

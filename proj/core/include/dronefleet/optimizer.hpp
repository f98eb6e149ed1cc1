#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dronefleet/costs.hpp"
#include "dronefleet/scenario.hpp"
#include "dronefleet/trajectory.hpp"

namespace dronefleet {

struct OptimizerConfig {
  double learning_rate = 1e-3;  // alpha, must lie in [0, 1]
  int max_iterations = 5000;
  double convergence_epsilon = 1e-6;  // stop when |J_t - J_{t-1}| < epsilon
  // Control-effort weight; when unset the scenario's lambda is used.
  std::optional<double> lambda_ctrl;
  std::uint64_t seed = 0;
  // Amplitude of the uniform per-component noise added to the zero initial
  // controls. Breaks symmetry at coincident gradients.
  double init_noise = 0.01;
};

struct OptimizationDiagnostics {
  // Exact building/zone coincidences encountered while evaluating gradients.
  std::size_t coincidence_events = 0;
  // Keep-out violations remaining in the final trajectories (the hinge is a
  // soft constraint; anything still inside a disc is reported here).
  struct ZoneViolation {
    int drone = 0;
    int t = 0;
    int zone = 0;
    double distance = 0.0;
  };
  std::vector<ZoneViolation> final_zone_violations;
};

struct OptimizationResult {
  std::vector<DroneTrajectory> trajectories;  // one per drone
  std::vector<CostBreakdown> cost_history;    // one entry per iteration
  CostBreakdown final_cost;                   // == cost_history.back()
  int iterations_used = 0;
  bool converged = false;
  OptimizationDiagnostics diagnostics;
};

// Gradient descent on the three-term cost. Each iteration evaluates the cost
// and its partial gradients, steps every state and control with rate alpha,
// and re-enforces the dynamics by re-rolling the states from x0 with the
// updated controls; the state steps are folded into the controls through the
// dynamics (u(t) -= alpha * pinv(B^T) * (g_x(t+1) - A^T g_x(t))), so with
// invertible B the re-rolled states realize the stepped states.
//
// Stops when the total cost reaches zero, when |dJ| between iterations drops
// below convergence_epsilon, or at max_iterations. Deterministic for a fixed
// (scenario, config). Throws DivergenceError when the cost leaves the finite
// range and ValidationError when the scenario or config is invalid.
OptimizationResult optimize(const Scenario& scenario, const OptimizerConfig& config);

}  // namespace dronefleet

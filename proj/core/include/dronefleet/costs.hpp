#pragma once

#include <span>
#include <vector>

#include "dronefleet/scenario.hpp"
#include "dronefleet/trajectory.hpp"

namespace dronefleet {

// The three cost terms and their sum. total is always computed as
// delivery + restricted + penalty in that order, so it is reproducible
// bit-for-bit.
struct CostBreakdown {
  double delivery = 0.0;
  double restricted = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

CostBreakdown make_cost_breakdown(double delivery, double restricted, double penalty);

// Sum over drones and buildings of c_j * ||x_i(N) - b_j||; only the final
// state of each trajectory enters.
double delivery_cost(std::span<const DroneTrajectory> trajectories,
                     std::span<const Building> buildings);

// Hinge keep-out penalty: sum over drones, timesteps t = 1..N and zones of
// max{d_min - ||x_i(t) - r_k||, 0}. The fixed start state t = 0 is exempt.
double restricted_cost(std::span<const DroneTrajectory> trajectories,
                       std::span<const RestrictedZone> zones, double d_min);

// lambda_ctrl * sum over drones and t = 1..N-1 of ||u_i(t)||^2. The first
// control u(0) is not counted.
double control_penalty(std::span<const DroneTrajectory> trajectories, double lambda_ctrl);

CostBreakdown total_cost(const Scenario& scenario,
                         std::span<const DroneTrajectory> trajectories,
                         double lambda_ctrl);

// A state that coincides exactly with a building or zone position; the norm
// gradient is undefined there and the zero subgradient was used instead.
struct CoincidenceEvent {
  enum class Kind { building, zone };
  int drone = 0;
  int t = 0;
  Kind kind = Kind::building;
  int index = 0;
};

// Partial gradients of the total cost, treating every state and control as an
// independent variable:
//   d/dx_i(N): delivery term c_j * (x - b_j) / ||x - b_j|| summed over buildings
//   d/dx_i(t): for each active hinge (distance < d_min), -(x - r_k) / ||x - r_k||
//   d/du_i(t): 2 * lambda_ctrl * u_i(t) for t = 1..N-1, zero at t = 0
// state_grads[i] has N+1 entries (entry 0 is always zero); control_grads[i]
// has N entries.
struct CostGradients {
  std::vector<std::vector<Eigen::Vector2d>> state_grads;
  std::vector<std::vector<Eigen::Vector2d>> control_grads;
  std::vector<CoincidenceEvent> coincidences;
};

CostGradients grad_total_cost(const Scenario& scenario,
                              std::span<const DroneTrajectory> trajectories,
                              double lambda_ctrl);

}  // namespace dronefleet

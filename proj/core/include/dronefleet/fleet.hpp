#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "dronefleet/scenario.hpp"

namespace dronefleet {

// A chosen set of drones plus the building-to-drone assignment realizing it.
struct FleetPlan {
  std::vector<int> active_drones;  // ascending drone indices
  std::vector<int> assignment;     // building index -> drone index
  double objective = 0.0;          // delivery term + lambda_fleet * |active|
  std::map<int, std::vector<int>> per_drone_tours;  // drone -> ordered buildings
};

// Delivery cost charged to one drone for the buildings assigned to it.
using DeliveryCostEvaluator =
    std::function<double(int drone, std::span<const int> buildings)>;

// The indicator objective: each assigned building contributes its cost c_j,
// independent of distance.
DeliveryCostEvaluator indicator_cost_evaluator(const Scenario& scenario);

// Distance-weighted alternative: each assigned building contributes
// c_j * ||start_i - b_j||.
DeliveryCostEvaluator start_distance_cost_evaluator(const Scenario& scenario);

// Exhaustive fleet-size minimization: enumerates every non-empty subset S of
// drones (n <= 16), assigns each building to its nearest drone in S by start
// position (ties to the lower drone index), and returns the plan minimizing
//   sum over drones of evaluator(drone, assigned) + lambda_fleet * |S|.
// Ties break toward smaller |S|, then the lexicographically smaller subset.
// The default evaluator is indicator_cost_evaluator. Throws ValidationError
// when the scenario has no buildings or more than 16 drones.
FleetPlan select_fleet(const Scenario& scenario, double lambda_fleet,
                       const DeliveryCostEvaluator& per_drone_costs = {});

// The default assignment rule used for fleet reporting: every building goes
// to its nearest drone start among the full fleet (ties to the lower index),
// and the active set is exactly the drones that received at least one
// building. The objective is the indicator value of this plan:
// sum of c_j + lambda_fleet * |active|.
FleetPlan nearest_assignment_plan(const Scenario& scenario, double lambda_fleet);

// Nearest-neighbor visit order over the assigned buildings, starting from the
// drone's start position. Ties break toward the lower building index.
std::vector<int> nearest_neighbor_tour(const Eigen::Vector2d& start,
                                       std::span<const int> buildings,
                                       const Scenario& scenario);

// Tours for every active drone of a plan.
std::map<int, std::vector<int>> extract_tour(const FleetPlan& plan,
                                             const Scenario& scenario);

}  // namespace dronefleet

#include "dronefleet/fleet.hpp"

#include <algorithm>
#include <limits>

#include "dronefleet/errors.hpp"

namespace dronefleet {

namespace {

// Nearest drone among `candidates` by start distance, ties to lower index.
int nearest_drone(const Scenario& scenario, std::span<const int> candidates,
                  const Eigen::Vector2d& position) {
  int best = candidates.front();
  double best_distance = (scenario.drone_starts[best] - position).norm();
  for (int drone : candidates.subspan(1)) {
    const double distance = (scenario.drone_starts[drone] - position).norm();
    if (distance < best_distance) {
      best = drone;
      best_distance = distance;
    }
  }
  return best;
}

std::vector<int> assign_to_nearest(const Scenario& scenario,
                                   std::span<const int> candidates) {
  std::vector<int> assignment(scenario.buildings.size());
  for (std::size_t j = 0; j < scenario.buildings.size(); ++j) {
    assignment[j] = nearest_drone(scenario, candidates, scenario.buildings[j].position);
  }
  return assignment;
}

std::map<int, std::vector<int>> group_by_drone(std::span<const int> assignment) {
  std::map<int, std::vector<int>> groups;
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    groups[assignment[j]].push_back(static_cast<int>(j));
  }
  return groups;
}

double plan_delivery_cost(const DeliveryCostEvaluator& evaluator,
                          const std::map<int, std::vector<int>>& groups) {
  double sum = 0.0;
  for (const auto& [drone, buildings] : groups) {
    sum += evaluator(drone, buildings);
  }
  return sum;
}

}  // namespace

DeliveryCostEvaluator indicator_cost_evaluator(const Scenario& scenario) {
  return [&scenario](int, std::span<const int> buildings) {
    double sum = 0.0;
    for (int j : buildings) sum += scenario.buildings[j].cost;
    return sum;
  };
}

DeliveryCostEvaluator start_distance_cost_evaluator(const Scenario& scenario) {
  return [&scenario](int drone, std::span<const int> buildings) {
    double sum = 0.0;
    for (int j : buildings) {
      sum += scenario.buildings[j].cost *
             (scenario.drone_starts[drone] - scenario.buildings[j].position).norm();
    }
    return sum;
  };
}

FleetPlan select_fleet(const Scenario& scenario, double lambda_fleet,
                       const DeliveryCostEvaluator& per_drone_costs) {
  if (scenario.buildings.empty()) {
    throw ValidationError("select_fleet: scenario has no buildings");
  }
  const int n = static_cast<int>(scenario.drone_starts.size());
  if (n < 1) throw ValidationError("select_fleet: scenario has no drones");
  if (n > 16) {
    throw ValidationError("select_fleet: exhaustive subset search supports at most "
                          "16 drones (got " + std::to_string(n) + ")");
  }
  const DeliveryCostEvaluator evaluator =
      per_drone_costs ? per_drone_costs : indicator_cost_evaluator(scenario);

  FleetPlan best;
  double best_objective = std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> subset;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(i);
    }
    const std::vector<int> assignment = assign_to_nearest(scenario, subset);
    const auto groups = group_by_drone(assignment);
    const double objective =
        plan_delivery_cost(evaluator, groups) + lambda_fleet * subset.size();

    const bool better =
        !have_best || objective < best_objective ||
        (objective == best_objective &&
         (subset.size() < best.active_drones.size() ||
          (subset.size() == best.active_drones.size() && subset < best.active_drones)));
    if (better) {
      best.active_drones = subset;
      best.assignment = assignment;
      best.objective = objective;
      best_objective = objective;
      have_best = true;
    }
  }

  best.per_drone_tours = extract_tour(best, scenario);
  return best;
}

FleetPlan nearest_assignment_plan(const Scenario& scenario, double lambda_fleet) {
  if (scenario.buildings.empty()) {
    throw ValidationError("nearest_assignment_plan: scenario has no buildings");
  }
  const int n = static_cast<int>(scenario.drone_starts.size());
  if (n < 1) throw ValidationError("nearest_assignment_plan: scenario has no drones");

  std::vector<int> fleet(n);
  for (int i = 0; i < n; ++i) fleet[i] = i;

  FleetPlan plan;
  plan.assignment = assign_to_nearest(scenario, fleet);
  for (const auto& [drone, buildings] : group_by_drone(plan.assignment)) {
    (void)buildings;
    plan.active_drones.push_back(drone);
  }
  double delivery = 0.0;
  for (const auto& building : scenario.buildings) delivery += building.cost;
  plan.objective = delivery + lambda_fleet * static_cast<double>(plan.active_drones.size());
  plan.per_drone_tours = extract_tour(plan, scenario);
  return plan;
}

std::vector<int> nearest_neighbor_tour(const Eigen::Vector2d& start,
                                       std::span<const int> buildings,
                                       const Scenario& scenario) {
  std::vector<int> remaining(buildings.begin(), buildings.end());
  std::sort(remaining.begin(), remaining.end());
  std::vector<int> tour;
  tour.reserve(remaining.size());
  Eigen::Vector2d at = start;
  while (!remaining.empty()) {
    std::size_t best = 0;
    double best_distance = (scenario.buildings[remaining[0]].position - at).norm();
    for (std::size_t c = 1; c < remaining.size(); ++c) {
      const double distance = (scenario.buildings[remaining[c]].position - at).norm();
      if (distance < best_distance) {
        best = c;
        best_distance = distance;
      }
    }
    const int chosen = remaining[best];
    tour.push_back(chosen);
    at = scenario.buildings[chosen].position;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return tour;
}

std::map<int, std::vector<int>> extract_tour(const FleetPlan& plan,
                                             const Scenario& scenario) {
  std::map<int, std::vector<int>> tours;
  for (const auto& [drone, buildings] : group_by_drone(plan.assignment)) {
    tours[drone] =
        nearest_neighbor_tour(scenario.drone_starts[drone], buildings, scenario);
  }
  return tours;
}

}  // namespace dronefleet

#include "dronefleet/costs.hpp"

#include <algorithm>
#include <cmath>

namespace dronefleet {

CostBreakdown make_cost_breakdown(double delivery, double restricted, double penalty) {
  CostBreakdown breakdown;
  breakdown.delivery = delivery;
  breakdown.restricted = restricted;
  breakdown.penalty = penalty;
  breakdown.total = delivery + restricted + penalty;
  return breakdown;
}

double delivery_cost(std::span<const DroneTrajectory> trajectories,
                     std::span<const Building> buildings) {
  double sum = 0.0;
  for (const auto& trajectory : trajectories) {
    const Eigen::Vector2d& final_state = trajectory.final_state();
    for (const auto& building : buildings) {
      sum += building.cost * (final_state - building.position).norm();
    }
  }
  return sum;
}

double restricted_cost(std::span<const DroneTrajectory> trajectories,
                       std::span<const RestrictedZone> zones, double d_min) {
  double sum = 0.0;
  for (const auto& trajectory : trajectories) {
    for (std::size_t t = 1; t < trajectory.states.size(); ++t) {
      for (const auto& zone : zones) {
        const double distance = (trajectory.states[t] - zone.position).norm();
        sum += std::max(d_min - distance, 0.0);
      }
    }
  }
  return sum;
}

double control_penalty(std::span<const DroneTrajectory> trajectories, double lambda_ctrl) {
  double sum = 0.0;
  for (const auto& trajectory : trajectories) {
    for (std::size_t t = 1; t < trajectory.controls.size(); ++t) {
      sum += trajectory.controls[t].squaredNorm();
    }
  }
  return lambda_ctrl * sum;
}

CostBreakdown total_cost(const Scenario& scenario,
                         std::span<const DroneTrajectory> trajectories,
                         double lambda_ctrl) {
  return make_cost_breakdown(delivery_cost(trajectories, scenario.buildings),
                             restricted_cost(trajectories, scenario.zones, scenario.d_min),
                             control_penalty(trajectories, lambda_ctrl));
}

CostGradients grad_total_cost(const Scenario& scenario,
                              std::span<const DroneTrajectory> trajectories,
                              double lambda_ctrl) {
  CostGradients grads;
  grads.state_grads.resize(trajectories.size());
  grads.control_grads.resize(trajectories.size());

  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& trajectory = trajectories[i];
    const int n = trajectory.horizon();
    auto& gx = grads.state_grads[i];
    auto& gu = grads.control_grads[i];
    gx.assign(trajectory.states.size(), Eigen::Vector2d::Zero());
    gu.assign(trajectory.controls.size(), Eigen::Vector2d::Zero());

    // Delivery term: pulls only the final state.
    const Eigen::Vector2d& final_state = trajectory.final_state();
    for (std::size_t j = 0; j < scenario.buildings.size(); ++j) {
      const Eigen::Vector2d diff = final_state - scenario.buildings[j].position;
      const double distance = diff.norm();
      if (distance == 0.0) {
        grads.coincidences.push_back({static_cast<int>(i), n,
                                      CoincidenceEvent::Kind::building,
                                      static_cast<int>(j)});
        continue;  // zero subgradient
      }
      gx[n] += scenario.buildings[j].cost * diff / distance;
    }

    // Restricted term: active hinges push states away from zones.
    for (std::size_t t = 1; t < trajectory.states.size(); ++t) {
      for (std::size_t k = 0; k < scenario.zones.size(); ++k) {
        const Eigen::Vector2d diff = trajectory.states[t] - scenario.zones[k].position;
        const double distance = diff.norm();
        if (distance == 0.0) {
          if (scenario.d_min > 0.0) {
            grads.coincidences.push_back({static_cast<int>(i), static_cast<int>(t),
                                          CoincidenceEvent::Kind::zone,
                                          static_cast<int>(k)});
          }
          continue;  // zero subgradient at the coincident point
        }
        if (distance < scenario.d_min) {
          gx[t] -= diff / distance;
        }
      }
    }

    // Control term: t = 0 is not counted.
    for (std::size_t t = 1; t < trajectory.controls.size(); ++t) {
      gu[t] = 2.0 * lambda_ctrl * trajectory.controls[t];
    }
  }
  return grads;
}

}  // namespace dronefleet

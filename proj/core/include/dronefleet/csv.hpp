#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dronefleet/bench.hpp"
#include "dronefleet/fleet.hpp"
#include "dronefleet/optimizer.hpp"
#include "dronefleet/qlearning.hpp"
#include "dronefleet/scenario.hpp"

namespace dronefleet {

// Shortest representation that parses back to the same double.
std::string format_double(double value);

// Writes via a temporary file in the same directory plus an atomic rename;
// readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// columns: iteration,J_delivery,J_restricted,J_penalty,J_total
std::string cost_history_csv(const OptimizationResult& result);

// columns: drone,t,x,y,u_x,u_y (u empty on the final state row)
std::string trajectory_csv(const OptimizationResult& result);

// columns: drone,visit_order,building_x,building_y,kind,cost
std::string fleet_plan_csv(const FleetPlan& plan, const Scenario& scenario);

// columns: episode,return,td_loss,epsilon
std::string learning_curve_csv(const TrainResult& result);

// columns: agent,step,col,row,action,reward (col,row after the move)
std::string policy_path_csv(const RolloutResult& rollout);

// columns: scenario,method,seed,optimal_drones,min_total_cost,
//          wall_time_seconds,converged,host
std::string report_csv(const ComparisonReport& report);

}  // namespace dronefleet

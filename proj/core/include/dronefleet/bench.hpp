#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dronefleet/fleet.hpp"
#include "dronefleet/grid_mdp.hpp"
#include "dronefleet/method.hpp"
#include "dronefleet/optimizer.hpp"
#include "dronefleet/qlearning.hpp"
#include "dronefleet/scenario.hpp"

namespace dronefleet {

// Everything a method run may need. Seeds are injected per run.
struct MethodConfigs {
  OptimizerConfig optimizer;
  TrainConfig train;
  GridRewardConfig rewards;
  // Fleet penalty weight; defaults to the scenario's lambda.
  std::optional<double> lambda_fleet;
  // When false (default) the MARL reward masks use the nearest-drone
  // assignment, so MPC and MARL face the same task split. When true every
  // agent may deliver every building.
  bool shared_task = false;
};

// One benchmark row.
//   mpc:  optimal_drones = active drones of the nearest-assignment plan,
//         min_total_cost = the optimizer's final total J
//   marl: optimal_drones = agents delivering >= 1 building in the greedy
//         rollout, min_total_cost = -(greedy episode return) on the artifact
//         reward scale, converged = greedy rollout delivered everything
struct RunMetrics {
  Method method = Method::mpc;
  int optimal_drones = 0;
  double min_total_cost = std::numeric_limits<double>::quiet_NaN();
  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
  bool converged = false;
  bool failed = false;
  std::string error;
};

// Runs one method once; wall time wraps the whole run on a monotonic clock.
// Method errors propagate, tagged with the method name.
RunMetrics run_method(const Scenario& scenario, Method method,
                      const MethodConfigs& configs, std::uint64_t seed);

struct ComparisonReport {
  std::string scenario;
  std::string host;
  std::vector<RunMetrics> rows;  // ordered by (method, seed)
  struct Aggregate {
    Method method = Method::mpc;
    int completed = 0;
    int requested = 0;
    double median_optimal_drones = std::numeric_limits<double>::quiet_NaN();
    double median_min_total_cost = std::numeric_limits<double>::quiet_NaN();
    double median_wall_time_seconds = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<Aggregate> aggregates;  // per method, completed rows only
};

// Cartesian product of methods x seeds. A failing run becomes a failed row
// carrying the error; the report is still produced.
ComparisonReport run_comparison(const Scenario& scenario, std::span<const Method> methods,
                                std::span<const std::uint64_t> seeds,
                                const MethodConfigs& configs);

enum class ReportFormat { text_table, csv };

std::string emit_report(const ComparisonReport& report, ReportFormat format);

// Rebuilds a report from its CSV form (aggregates recomputed).
ComparisonReport parse_report_csv(const std::string& text);

std::string host_description();

}  // namespace dronefleet

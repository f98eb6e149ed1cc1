#include "dronefleet/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "dronefleet/csv.hpp"
#include "dronefleet/errors.hpp"

namespace dronefleet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RunMetrics run_mpc(const Scenario& scenario, const MethodConfigs& configs,
                   std::uint64_t seed) {
  RunMetrics metrics;
  metrics.method = Method::mpc;
  metrics.seed = seed;

  OptimizerConfig optimizer = configs.optimizer;
  optimizer.seed = seed;
  const OptimizationResult result = optimize(scenario, optimizer);
  const double lambda_fleet = configs.lambda_fleet.value_or(scenario.lambda);
  const FleetPlan plan = nearest_assignment_plan(scenario, lambda_fleet);

  metrics.optimal_drones = static_cast<int>(plan.active_drones.size());
  metrics.min_total_cost = result.final_cost.total;
  metrics.converged = result.converged;
  return metrics;
}

RunMetrics run_marl(const Scenario& scenario, Method method, const MethodConfigs& configs,
                    std::uint64_t seed) {
  RunMetrics metrics;
  metrics.method = method;
  metrics.seed = seed;

  std::optional<std::vector<int>> assignment;
  if (!configs.shared_task) {
    const double lambda_fleet = configs.lambda_fleet.value_or(scenario.lambda);
    assignment = nearest_assignment_plan(scenario, lambda_fleet).assignment;
  }
  const GridMDP mdp = discretize(scenario, assignment, configs.rewards);

  TrainConfig train_config = configs.train;
  train_config.seed = seed;
  const TrainResult trained = train(mdp, method, train_config);
  const RolloutResult rollout = greedy_rollout(mdp, trained.tables, method);

  int delivering = 0;
  for (int count : rollout.deliveries_per_agent) {
    if (count > 0) ++delivering;
  }
  metrics.optimal_drones = delivering;
  metrics.min_total_cost = -rollout.episode_return;
  metrics.converged = rollout.all_delivered;
  return metrics;
}

double median(std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

void compute_aggregates(ComparisonReport& report) {
  std::vector<Method> methods;
  for (const RunMetrics& row : report.rows) methods.push_back(row.method);
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  report.aggregates.clear();
  for (Method method : methods) {
    ComparisonReport::Aggregate aggregate;
    aggregate.method = method;
    std::vector<double> drones;
    std::vector<double> costs;
    std::vector<double> walls;
    for (const RunMetrics& row : report.rows) {
      if (row.method != method) continue;
      ++aggregate.requested;
      if (row.failed) continue;
      ++aggregate.completed;
      drones.push_back(static_cast<double>(row.optimal_drones));
      costs.push_back(row.min_total_cost);
      walls.push_back(row.wall_time_seconds);
    }
    aggregate.median_optimal_drones = median(drones);
    aggregate.median_min_total_cost = median(costs);
    aggregate.median_wall_time_seconds = median(walls);
    report.aggregates.push_back(aggregate);
  }
}

}  // namespace

RunMetrics run_method(const Scenario& scenario, Method method,
                      const MethodConfigs& configs, std::uint64_t seed) {
  const auto t0 = Clock::now();
  try {
    RunMetrics metrics = method == Method::mpc ? run_mpc(scenario, configs, seed)
                                               : run_marl(scenario, method, configs, seed);
    metrics.wall_time_seconds = seconds_since(t0);
    return metrics;
  } catch (const TableBudgetError& e) {
    throw TableBudgetError("[" + std::string(to_string(method)) + "] " + e.what());
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.iteration, e.last_finite_total,
                          "[" + std::string(to_string(method)) + "] " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error("[" + std::string(to_string(method)) + "] " + e.what());
  }
}

ComparisonReport run_comparison(const Scenario& scenario, std::span<const Method> methods,
                                std::span<const std::uint64_t> seeds,
                                const MethodConfigs& configs) {
  if (methods.empty()) throw ValidationError("run_comparison: no methods given");
  if (seeds.empty()) throw ValidationError("run_comparison: no seeds given");

  std::vector<Method> ordered(methods.begin(), methods.end());
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
  std::vector<std::uint64_t> ordered_seeds(seeds.begin(), seeds.end());
  std::sort(ordered_seeds.begin(), ordered_seeds.end());
  ordered_seeds.erase(std::unique(ordered_seeds.begin(), ordered_seeds.end()),
                      ordered_seeds.end());

  ComparisonReport report;
  report.scenario = scenario.name;
  report.host = host_description();

  for (Method method : ordered) {
    for (std::uint64_t seed : ordered_seeds) {
      const auto t0 = Clock::now();
      try {
        report.rows.push_back(run_method(scenario, method, configs, seed));
      } catch (const std::exception& e) {
        RunMetrics failed;
        failed.method = method;
        failed.seed = seed;
        failed.failed = true;
        failed.error = e.what();
        failed.wall_time_seconds = seconds_since(t0);
        report.rows.push_back(failed);
      }
    }
  }

  compute_aggregates(report);
  return report;
}

namespace {

std::string upper_name(Method method) {
  std::string name(to_string(method));
  for (char& c : name) c = static_cast<char>(std::toupper(c));
  return name;
}

std::string text_table(const ComparisonReport& report) {
  constexpr int kLabelWidth = 26;
  constexpr int kCellWidth = 14;
  std::ostringstream out;
  out << "scenario: " << report.scenario << "\nhost: " << report.host << "\n\n";
  out << std::left << std::setw(kLabelWidth) << "Metric";
  for (const auto& aggregate : report.aggregates) {
    out << std::setw(kCellWidth) << upper_name(aggregate.method);
  }
  out << '\n';

  auto row = [&](const std::string& label, auto value_of) {
    out << std::left << std::setw(kLabelWidth) << label;
    for (const auto& aggregate : report.aggregates) {
      out << std::setw(kCellWidth) << value_of(aggregate);
    }
    out << '\n';
  };
  row("Optimal number of drones", [](const auto& a) {
    return a.completed == 0 ? std::string("-") : format_double(a.median_optimal_drones);
  });
  row("Minimum total cost", [](const auto& a) {
    return a.completed == 0 ? std::string("-") : format_double(a.median_min_total_cost);
  });
  row("Time to convergence [s]", [](const auto& a) {
    if (a.completed == 0) return std::string("-");
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(3) << a.median_wall_time_seconds;
    return cell.str();
  });

  bool any_failed = false;
  for (const RunMetrics& r : report.rows) any_failed |= r.failed;
  if (any_failed) {
    out << "\nfailed runs:\n";
    for (const RunMetrics& r : report.rows) {
      if (r.failed) {
        out << "  " << to_string(r.method) << " seed " << r.seed << ": " << r.error << '\n';
      }
    }
  }
  out << "\nnote: MARL costs are -(greedy-rollout return) on the artifact reward scale;\n"
         "MPC costs are the optimizer's final total J. Values are medians over seeds.\n";
  return out.str();
}

}  // namespace

std::string emit_report(const ComparisonReport& report, ReportFormat format) {
  if (format == ReportFormat::csv) return report_csv(report);
  return text_table(report);
}

ComparisonReport parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("report csv: empty input");
  const std::string expected =
      "scenario,method,seed,optimal_drones,min_total_cost,wall_time_seconds,"
      "converged,host";
  if (line != expected) throw ParseError("report csv: unexpected header '" + line + "'");

  ComparisonReport report;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream split(line);
    while (std::getline(split, field, ',')) fields.push_back(field);
    if (fields.size() != 8) {
      throw ParseError("report csv line " + std::to_string(line_number) +
                       ": expected 8 fields, got " + std::to_string(fields.size()));
    }
    RunMetrics row;
    report.scenario = fields[0];
    row.method = method_from_string(fields[1]);
    row.seed = std::stoull(fields[2]);
    row.optimal_drones = std::stoi(fields[3]);
    row.min_total_cost = std::stod(fields[4]);
    row.wall_time_seconds = std::stod(fields[5]);
    row.converged = fields[6] == "true";
    row.failed = std::isnan(row.min_total_cost) && !row.converged && row.optimal_drones == 0;
    report.host = fields[7];
    report.rows.push_back(row);
  }
  if (report.rows.empty()) throw ParseError("report csv: no data rows");

  compute_aggregates(report);
  return report;
}

}  // namespace dronefleet

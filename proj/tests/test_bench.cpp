#include <doctest.h>

#include <sstream>

#include "dronefleet/bench.hpp"
#include "dronefleet/csv.hpp"

using namespace dronefleet;

namespace {

Scenario tiny_scenario() {
  Scenario s;
  s.name = "tiny";
  s.buildings = {{{1, 0}, BuildingKind::home, 1.0}, {{2, 2}, BuildingKind::shop, 1.5}};
  s.drone_starts = {{0, 0}, {3, 3}};
  s.horizon = 4;
  s.d_min = 0.0;
  s.lambda = 2.0;
  return s;
}

MethodConfigs fast_configs() {
  MethodConfigs configs;
  configs.optimizer.max_iterations = 300;
  configs.train.episodes = 150;
  configs.rewards.max_steps = 40;
  return configs;
}

}  // namespace

TEST_CASE("a degenerate scenario yields one drone and the forced objective") {
  Scenario s;
  s.name = "degenerate";
  s.buildings = {{{0, 0}, BuildingKind::home, 0.0}};  // on the drone start, cost 0
  s.drone_starts = {{0, 0}};
  s.horizon = 3;
  s.d_min = 0.0;
  s.lambda = 5.0;

  MethodConfigs configs = fast_configs();
  configs.optimizer.lambda_ctrl = 0.0;
  configs.optimizer.init_noise = 0.0;
  const RunMetrics metrics = run_method(s, Method::mpc, configs, 0);
  CHECK(metrics.optimal_drones == 1);
  CHECK(metrics.min_total_cost == 0.0);
  CHECK(metrics.converged);

  const FleetPlan plan = select_fleet(s, 5.0);
  CHECK(plan.objective == 5.0);  // lambda_fleet * 1 under the indicator objective
}

TEST_CASE("env1 mpc metrics report one active drone") {
  MethodConfigs configs = fast_configs();
  const RunMetrics metrics = run_method(builtin_scenario("env1"), Method::mpc, configs, 0);
  CHECK(metrics.optimal_drones == 1);
  CHECK(metrics.wall_time_seconds > 0.0);
  CHECK(std::isfinite(metrics.min_total_cost));
}

TEST_CASE("env2 mpc metrics report two active drones") {
  MethodConfigs configs = fast_configs();
  const RunMetrics metrics = run_method(builtin_scenario("env2"), Method::mpc, configs, 0);
  CHECK(metrics.optimal_drones == 2);
}

TEST_CASE("a single method and seed produce a single row") {
  const std::vector<Method> methods = {Method::mpc};
  const std::vector<std::uint64_t> seeds = {0};
  const ComparisonReport report =
      run_comparison(tiny_scenario(), methods, seeds, fast_configs());
  CHECK(report.rows.size() == 1);
  CHECK(report.aggregates.size() == 1);
}

TEST_CASE("four methods and three seeds produce twelve ordered rows") {
  const std::vector<Method> methods = {Method::vdn, Method::mpc, Method::jal, Method::iql};
  const std::vector<std::uint64_t> seeds = {2, 0, 1};
  const ComparisonReport report =
      run_comparison(tiny_scenario(), methods, seeds, fast_configs());
  REQUIRE(report.rows.size() == 12);
  // Rows come back ordered by (method, seed) with the canonical method order.
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(report.rows[i].method == static_cast<Method>(i / 3));
    CHECK(report.rows[i].seed == i % 3);
  }
}

TEST_CASE("method failures are recorded as failed rows") {
  // env2 with 5 agents exceeds the JAL joint-action budget.
  const std::vector<Method> methods = {Method::mpc, Method::jal};
  const std::vector<std::uint64_t> seeds = {0};
  MethodConfigs configs = fast_configs();
  configs.train.episodes = 30;
  const ComparisonReport report =
      run_comparison(builtin_scenario("env2"), methods, seeds, configs);
  REQUIRE(report.rows.size() == 2);
  CHECK(!report.rows[0].failed);
  CHECK(report.rows[1].failed);
  CHECK(report.rows[1].error.find("[jal]") != std::string::npos);
  for (const auto& aggregate : report.aggregates) {
    if (aggregate.method == Method::jal) CHECK(aggregate.completed == 0);
  }
}

TEST_CASE("the text table carries the method columns in paper order") {
  const std::vector<Method> methods = {Method::vdn, Method::iql, Method::jal, Method::mpc};
  const std::vector<std::uint64_t> seeds = {0};
  const ComparisonReport report =
      run_comparison(tiny_scenario(), methods, seeds, fast_configs());
  const std::string table = emit_report(report, ReportFormat::text_table);
  const auto mpc_at = table.find("MPC");
  const auto iql_at = table.find("IQL");
  const auto jal_at = table.find("JAL");
  const auto vdn_at = table.find("VDN");
  REQUIRE(mpc_at != std::string::npos);
  CHECK(mpc_at < iql_at);
  CHECK(iql_at < jal_at);
  CHECK(jal_at < vdn_at);
  CHECK(table.find("Optimal number of drones") != std::string::npos);
  CHECK(table.find("Minimum total cost") != std::string::npos);
  CHECK(table.find("Time to convergence") != std::string::npos);
}

TEST_CASE("the report csv round-trips numeric fields at full precision") {
  const std::vector<Method> methods = {Method::mpc, Method::iql};
  const std::vector<std::uint64_t> seeds = {0, 1};
  const ComparisonReport report =
      run_comparison(tiny_scenario(), methods, seeds, fast_configs());
  const std::string csv = emit_report(report, ReportFormat::csv);

  const ComparisonReport parsed = parse_report_csv(csv);
  REQUIRE(parsed.rows.size() == report.rows.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    CHECK(parsed.rows[i].method == report.rows[i].method);
    CHECK(parsed.rows[i].seed == report.rows[i].seed);
    CHECK(parsed.rows[i].optimal_drones == report.rows[i].optimal_drones);
    CHECK(parsed.rows[i].min_total_cost == report.rows[i].min_total_cost);
    CHECK(parsed.rows[i].wall_time_seconds == report.rows[i].wall_time_seconds);
    CHECK(parsed.rows[i].converged == report.rows[i].converged);
  }
  CHECK(parsed.scenario == report.scenario);
  // Re-emitting the parsed report reproduces the csv byte for byte.
  CHECK(emit_report(parsed, ReportFormat::csv) == csv);
}

TEST_CASE("reports are deterministic modulo wall time") {
  const std::vector<Method> methods = {Method::mpc, Method::iql};
  const std::vector<std::uint64_t> seeds = {7};
  const ComparisonReport a = run_comparison(tiny_scenario(), methods, seeds, fast_configs());
  const ComparisonReport b = run_comparison(tiny_scenario(), methods, seeds, fast_configs());
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].optimal_drones == b.rows[i].optimal_drones);
    CHECK(a.rows[i].min_total_cost == b.rows[i].min_total_cost);
    CHECK(a.rows[i].converged == b.rows[i].converged);
  }
}

TEST_CASE("bench mpc metrics equal a direct mpc_core run") {
  const Scenario s = builtin_scenario("env1");
  MethodConfigs configs = fast_configs();
  const RunMetrics metrics = run_method(s, Method::mpc, configs, 5);

  OptimizerConfig direct = configs.optimizer;
  direct.seed = 5;
  const OptimizationResult result = optimize(s, direct);
  const FleetPlan plan = nearest_assignment_plan(s, s.lambda);
  CHECK(metrics.min_total_cost == result.final_cost.total);
  CHECK(metrics.optimal_drones == static_cast<int>(plan.active_drones.size()));
  CHECK(metrics.converged == result.converged);
}

TEST_CASE("format_double emits shortest round-trip representations") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  const double value = 541.93500388353413;
  CHECK(std::stod(format_double(value)) == value);
}

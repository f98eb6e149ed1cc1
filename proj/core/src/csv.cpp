#include "dronefleet/csv.hpp"

#include <sys/utsname.h>

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "dronefleet/errors.hpp"

namespace dronefleet {

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buffer, end);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path directory = path.parent_path();
  if (directory.empty()) directory = ".";
  std::filesystem::create_directories(directory);
  const std::filesystem::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + temp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

std::string cost_history_csv(const OptimizationResult& result) {
  std::ostringstream out;
  out << "iteration,J_delivery,J_restricted,J_penalty,J_total\n";
  for (std::size_t i = 0; i < result.cost_history.size(); ++i) {
    const CostBreakdown& c = result.cost_history[i];
    out << (i + 1) << ',' << format_double(c.delivery) << ',' << format_double(c.restricted)
        << ',' << format_double(c.penalty) << ',' << format_double(c.total) << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const OptimizationResult& result) {
  std::ostringstream out;
  out << "drone,t,x,y,u_x,u_y\n";
  for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
    const DroneTrajectory& trajectory = result.trajectories[i];
    for (std::size_t t = 0; t < trajectory.states.size(); ++t) {
      out << i << ',' << t << ',' << format_double(trajectory.states[t].x()) << ','
          << format_double(trajectory.states[t].y()) << ',';
      if (t < trajectory.controls.size()) {
        out << format_double(trajectory.controls[t].x()) << ','
            << format_double(trajectory.controls[t].y());
      } else {
        out << ',';
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string fleet_plan_csv(const FleetPlan& plan, const Scenario& scenario) {
  std::ostringstream out;
  out << "drone,visit_order,building_x,building_y,kind,cost\n";
  for (const auto& [drone, tour] : plan.per_drone_tours) {
    for (std::size_t order = 0; order < tour.size(); ++order) {
      const Building& b = scenario.buildings[static_cast<std::size_t>(tour[order])];
      out << drone << ',' << order << ',' << format_double(b.position.x()) << ','
          << format_double(b.position.y()) << ',' << to_string(b.kind) << ','
          << format_double(b.cost) << '\n';
    }
  }
  return out.str();
}

std::string learning_curve_csv(const TrainResult& result) {
  std::ostringstream out;
  out << "episode,return,td_loss,epsilon\n";
  for (std::size_t e = 0; e < result.episode_returns.size(); ++e) {
    out << e << ',' << format_double(result.episode_returns[e]) << ','
        << format_double(result.episode_td_losses[e]) << ','
        << format_double(result.episode_epsilons[e]) << '\n';
  }
  return out.str();
}

namespace {

std::string_view action_name(int action) {
  switch (static_cast<Action>(action)) {
    case Action::up: return "up";
    case Action::down: return "down";
    case Action::left: return "left";
    case Action::right: return "right";
    case Action::stay: return "stay";
  }
  return "stay";
}

}  // namespace

std::string policy_path_csv(const RolloutResult& rollout) {
  std::ostringstream out;
  out << "agent,step,col,row,action,reward\n";
  for (std::size_t agent = 0; agent < rollout.paths.size(); ++agent) {
    for (std::size_t step = 0; step < rollout.actions[agent].size(); ++step) {
      const Cell cell = rollout.paths[agent][step + 1];
      out << agent << ',' << step << ',' << cell.col << ',' << cell.row << ','
          << action_name(rollout.actions[agent][step]) << ','
          << format_double(rollout.rewards[agent][step]) << '\n';
    }
  }
  return out.str();
}

std::string report_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "scenario,method,seed,optimal_drones,min_total_cost,wall_time_seconds,"
         "converged,host\n";
  for (const RunMetrics& row : report.rows) {
    out << report.scenario << ',' << to_string(row.method) << ',' << row.seed << ','
        << row.optimal_drones << ',' << format_double(row.min_total_cost) << ','
        << format_double(row.wall_time_seconds) << ','
        << (row.converged ? "true" : "false") << ',' << report.host << '\n';
  }
  return out.str();
}

std::string host_description() {
  utsname info{};
  if (uname(&info) != 0) return "unknown-host";
  std::string host = std::string(info.sysname) + " " + info.release + " " + info.machine;
  // Keep the report CSV free of separators.
  for (char& c : host) {
    if (c == ',' || c == '\n') c = ';';
  }
  return host;
}

}  // namespace dronefleet

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dronefleet/bench.hpp"
#include "dronefleet/csv.hpp"
#include "dronefleet/errors.hpp"
#include "dronefleet/fleet.hpp"
#include "dronefleet/method.hpp"
#include "dronefleet/optimizer.hpp"
#include "dronefleet/qlearning.hpp"
#include "dronefleet/scenario.hpp"

namespace dronefleet {

namespace {

namespace fs = std::filesystem;

std::string default_out_dir() {
  if (const char* env = std::getenv("DRONEFLEET_OUT_DIR")) return env;
  return ".";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

// Scenario selection plus the override flags shared by every run command.
struct ScenarioOptions {
  std::string builtin_id;
  std::string file_path;
  std::optional<int> horizon;
  std::optional<double> d_min;
  std::optional<double> lambda;

  void attach(CLI::App* cmd) {
    auto* scenario =
        cmd->add_option("--scenario", builtin_id, "builtin scenario id (env1, env2)");
    auto* file = cmd->add_option("--file", file_path, "scenario JSON file");
    scenario->excludes(file);
    file->excludes(scenario);
    cmd->add_option("--horizon", horizon, "override the lookahead horizon N");
    cmd->add_option("--d-min", d_min, "override the keep-out distance");
    cmd->add_option("--lambda", lambda, "override the scenario penalty weight");
  }

  Scenario load() const {
    if (builtin_id.empty() == file_path.empty()) {
      throw ValidationError("exactly one scenario source required: --scenario or --file");
    }
    Scenario scenario = builtin_id.empty() ? load_scenario(read_file(file_path))
                                           : builtin_scenario(builtin_id);
    if (horizon) scenario.horizon = *horizon;
    if (d_min) scenario.d_min = *d_min;
    if (lambda) scenario.lambda = *lambda;
    if (auto violations = validate(scenario); !violations.empty()) {
      std::ostringstream msg;
      msg << "scenario failed validation:";
      for (const auto& v : violations) msg << "\n  - " << v;
      throw ValidationError(msg.str());
    }
    return scenario;
  }
};

struct MpcOptions {
  double alpha = 1e-3;
  int max_iters = 5000;
  double epsilon = 1e-6;
  std::optional<double> lambda_ctrl;
  double init_noise = 0.01;

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "gradient descent learning rate")
        ->capture_default_str();
    cmd->add_option("--max-iters", max_iters, "iteration cap")->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "convergence threshold on |dJ|")
        ->capture_default_str();
    cmd->add_option("--lambda-ctrl", lambda_ctrl,
                    "control-effort weight (default: scenario lambda)");
    cmd->add_option("--init-noise", init_noise, "control initialization noise amplitude")
        ->capture_default_str();
  }

  OptimizerConfig config(std::uint64_t seed) const {
    OptimizerConfig config;
    config.learning_rate = alpha;
    config.max_iterations = max_iters;
    config.convergence_epsilon = epsilon;
    config.lambda_ctrl = lambda_ctrl;
    config.seed = seed;
    config.init_noise = init_noise;
    return config;
  }
};

struct MarlOptions {
  int episodes = 3000;
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  std::uint64_t jal_budget = 1024;
  bool shared_task = false;
  GridRewardConfig rewards;

  // alpha_flag lets `compare` host both learning rates side by side.
  void attach(CLI::App* cmd, const std::string& alpha_flag = "--alpha") {
    cmd->add_option("--episodes", episodes, "training episodes")->capture_default_str();
    cmd->add_option(alpha_flag, alpha, "Q-learning rate")->capture_default_str();
    cmd->add_option("--gamma", gamma, "discount factor")->capture_default_str();
    cmd->add_option("--epsilon-start", epsilon_start, "initial exploration rate")
        ->capture_default_str();
    cmd->add_option("--epsilon-end", epsilon_end, "final exploration rate")
        ->capture_default_str();
    cmd->add_option("--jal-budget", jal_budget, "joint-action budget for JAL")
        ->capture_default_str();
    cmd->add_flag("--shared-task", shared_task,
                  "let every agent deliver every building (default: nearest-drone split)");
    cmd->add_option("--step-penalty", rewards.step_penalty, "per-step penalty")
        ->capture_default_str();
    cmd->add_option("--zone-penalty", rewards.zone_penalty, "zone-entry penalty")
        ->capture_default_str();
    cmd->add_option("--reward-scale", rewards.delivery_reward_scale,
                    "delivery reward per unit cost")
        ->capture_default_str();
    cmd->add_option("--max-steps", rewards.max_steps,
                    "episode step cap (0: 2*width*height)")
        ->capture_default_str();
  }

  TrainConfig config(std::uint64_t seed) const {
    TrainConfig config;
    config.episodes = episodes;
    config.alpha = alpha;
    config.gamma = gamma;
    config.epsilon_start = epsilon_start;
    config.epsilon_end = epsilon_end;
    config.seed = seed;
    config.jal_table_budget = jal_budget;
    return config;
  }
};

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> methods;
  std::istringstream split(list);
  std::string item;
  while (std::getline(split, item, ',')) {
    if (!item.empty()) methods.push_back(method_from_string(item));
  }
  if (methods.empty()) throw ValidationError("--methods: no methods given");
  return methods;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> seeds;
  std::istringstream split(list);
  std::string item;
  while (std::getline(split, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw ValidationError("--seeds: no seeds given");
  return seeds;
}

int command_scenarios() {
  std::cout << "id     M (buildings)  K (zones)  n (drones)  N (horizon)  lambda\n";
  for (const auto& id : builtin_scenario_ids()) {
    const Scenario s = builtin_scenario(id);
    std::cout << id << "   " << s.buildings.size() << "             " << s.zones.size()
              << "          " << s.drone_starts.size() << "           " << s.horizon
              << "           " << format_double(s.lambda) << '\n';
  }
  return 0;
}

int command_validate(const ScenarioOptions& source) {
  if (source.builtin_id.empty() == source.file_path.empty()) {
    throw ValidationError("exactly one scenario source required: --scenario or --file");
  }
  Scenario scenario;
  try {
    scenario = source.builtin_id.empty()
                   ? load_scenario(read_file(source.file_path))
                   : builtin_scenario(source.builtin_id);
  } catch (const std::exception& e) {
    std::cout << e.what() << '\n';
    return 1;
  }
  if (source.horizon) scenario.horizon = *source.horizon;
  if (source.d_min) scenario.d_min = *source.d_min;
  if (source.lambda) scenario.lambda = *source.lambda;
  const auto violations = validate(scenario);
  if (violations.empty()) {
    std::cout << "scenario '" << scenario.name << "' is valid\n";
    return 0;
  }
  for (const auto& v : violations) std::cout << v << '\n';
  return 1;
}

int command_run_mpc(const ScenarioOptions& source, const MpcOptions& mpc,
                    std::optional<double> lambda_fleet, std::uint64_t seed,
                    const std::string& out_dir) {
  const Scenario scenario = source.load();
  const OptimizationResult result = optimize(scenario, mpc.config(seed));
  const FleetPlan plan =
      nearest_assignment_plan(scenario, lambda_fleet.value_or(scenario.lambda));

  const fs::path dir(out_dir);
  const std::string prefix = scenario.name.empty() ? "scenario" : scenario.name;
  write_file_atomic(dir / (prefix + "_cost_history.csv"), cost_history_csv(result));
  write_file_atomic(dir / (prefix + "_trajectories.csv"), trajectory_csv(result));
  write_file_atomic(dir / (prefix + "_fleet_plan.csv"), fleet_plan_csv(plan, scenario));

  std::cout << "scenario " << scenario.name << ": " << result.iterations_used
            << " iterations, " << (result.converged ? "converged" : "not converged")
            << ", final J = " << format_double(result.final_cost.total) << '\n'
            << "active drones (nearest assignment): " << plan.active_drones.size() << '\n';
  if (!result.diagnostics.final_zone_violations.empty()) {
    std::cout << "warning: " << result.diagnostics.final_zone_violations.size()
              << " keep-out violations remain in the final trajectories\n";
  }
  std::cout << "wrote " << (dir / (prefix + "_cost_history.csv")).string() << ", "
            << (dir / (prefix + "_trajectories.csv")).string() << ", "
            << (dir / (prefix + "_fleet_plan.csv")).string() << '\n';
  return 0;
}

int command_train_marl(const ScenarioOptions& source, const MarlOptions& marl,
                       const std::string& method_name,
                       std::optional<double> lambda_fleet, std::uint64_t seed,
                       const std::string& out_dir) {
  const Scenario scenario = source.load();
  const Method method = method_from_string(method_name);
  if (!is_marl(method)) throw ValidationError("train-marl: --method must be iql, jal or vdn");

  std::optional<std::vector<int>> assignment;
  if (!marl.shared_task) {
    assignment =
        nearest_assignment_plan(scenario, lambda_fleet.value_or(scenario.lambda)).assignment;
  }
  const GridMDP mdp = discretize(scenario, assignment, marl.rewards);
  const TrainResult trained = train(mdp, method, marl.config(seed));
  const RolloutResult rollout = greedy_rollout(mdp, trained.tables, method);

  const fs::path dir(out_dir);
  const std::string prefix =
      (scenario.name.empty() ? "scenario" : scenario.name) + "_" +
      std::string(to_string(method));
  write_file_atomic(dir / (prefix + "_learning_curve.csv"), learning_curve_csv(trained));
  write_file_atomic(dir / (prefix + "_policy_paths.csv"), policy_path_csv(rollout));

  std::cout << "trained " << to_string(method) << " on " << scenario.name << " ("
            << mdp.width << "x" << mdp.height << " grid, " << marl.episodes
            << " episodes)\n"
            << "greedy rollout: return " << format_double(rollout.episode_return) << ", "
            << rollout.delivered_buildings.size() << "/" << mdp.building_cells.size()
            << " delivered in " << rollout.steps << " steps\n";
  std::cout << "wrote " << (dir / (prefix + "_learning_curve.csv")).string() << ", "
            << (dir / (prefix + "_policy_paths.csv")).string() << '\n';
  return 0;
}

int command_compare(const ScenarioOptions& source, const MpcOptions& mpc,
                    const MarlOptions& marl, const std::string& methods_list,
                    const std::string& seeds_list, std::optional<double> lambda_fleet,
                    const std::string& out_dir) {
  const Scenario scenario = source.load();
  const std::vector<Method> methods = parse_methods(methods_list);
  const std::vector<std::uint64_t> seeds = parse_seeds(seeds_list);

  MethodConfigs configs;
  configs.optimizer = mpc.config(0);
  configs.train = marl.config(0);
  configs.rewards = marl.rewards;
  configs.lambda_fleet = lambda_fleet;
  configs.shared_task = marl.shared_task;

  const ComparisonReport report = run_comparison(scenario, methods, seeds, configs);
  const fs::path dir(out_dir);
  const std::string prefix = scenario.name.empty() ? "scenario" : scenario.name;
  write_file_atomic(dir / (prefix + "_report.csv"),
                    emit_report(report, ReportFormat::csv));
  std::cout << emit_report(report, ReportFormat::text_table);
  std::cout << "wrote " << (dir / (prefix + "_report.csv")).string() << '\n';
  return 0;
}

int command_emit(const std::string& input, const std::string& format,
                 const std::string& out_path) {
  const ComparisonReport report = parse_report_csv(read_file(input));
  ReportFormat report_format;
  if (format == "text-table") {
    report_format = ReportFormat::text_table;
  } else if (format == "csv") {
    report_format = ReportFormat::csv;
  } else {
    throw ValidationError("emit: --format must be text-table or csv");
  }
  const std::string rendered = emit_report(report, report_format);
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    write_file_atomic(out_path, rendered);
    std::cout << "wrote " << out_path << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"drone delivery planning: MPC trajectory optimization and tabular "
               "MARL baselines"};
  app.require_subcommand(1);

  auto* scenarios_cmd = app.add_subcommand("scenarios", "list builtin scenarios");

  ScenarioOptions validate_source;
  auto* validate_cmd = app.add_subcommand("validate", "check a scenario's invariants");
  validate_source.attach(validate_cmd);

  ScenarioOptions mpc_source;
  MpcOptions mpc_options;
  std::optional<double> mpc_lambda_fleet;
  std::uint64_t mpc_seed = 0;
  std::string mpc_out_dir = default_out_dir();
  auto* run_mpc_cmd =
      app.add_subcommand("run-mpc", "optimize trajectories and write the data files");
  mpc_source.attach(run_mpc_cmd);
  mpc_options.attach(run_mpc_cmd);
  run_mpc_cmd->add_option("--lambda-fleet", mpc_lambda_fleet,
                          "fleet penalty weight (default: scenario lambda)");
  run_mpc_cmd->add_option("--seed", mpc_seed, "control-noise seed")->capture_default_str();
  run_mpc_cmd->add_option("--out-dir", mpc_out_dir, "output directory")
      ->capture_default_str();

  ScenarioOptions marl_source;
  MarlOptions marl_options;
  std::string marl_method = "iql";
  std::optional<double> marl_lambda_fleet;
  std::uint64_t marl_seed = 0;
  std::string marl_out_dir = default_out_dir();
  auto* train_cmd =
      app.add_subcommand("train-marl", "train a tabular learner and write its curves");
  marl_source.attach(train_cmd);
  marl_options.attach(train_cmd);
  train_cmd->add_option("--method", marl_method, "iql, jal or vdn")
      ->capture_default_str();
  train_cmd->add_option("--lambda-fleet", marl_lambda_fleet,
                        "fleet penalty weight used for the task split");
  train_cmd->add_option("--seed", marl_seed, "training seed")->capture_default_str();
  train_cmd->add_option("--out-dir", marl_out_dir, "output directory")
      ->capture_default_str();

  ScenarioOptions compare_source;
  MpcOptions compare_mpc;
  MarlOptions compare_marl;
  std::string compare_methods = "mpc,iql,jal,vdn";
  std::string compare_seeds = "0";
  std::optional<double> compare_lambda_fleet;
  std::string compare_out_dir = default_out_dir();
  auto* compare_cmd =
      app.add_subcommand("compare", "run several methods and emit the comparison report");
  compare_source.attach(compare_cmd);
  compare_mpc.attach(compare_cmd);
  compare_marl.attach(compare_cmd, "--marl-alpha");
  compare_cmd->add_option("--methods", compare_methods, "comma-separated method list")
      ->capture_default_str();
  compare_cmd->add_option("--seeds", compare_seeds, "comma-separated seed list")
      ->capture_default_str();
  compare_cmd->add_option("--lambda-fleet", compare_lambda_fleet,
                          "fleet penalty weight (default: scenario lambda)");
  compare_cmd->add_option("--out-dir", compare_out_dir, "output directory")
      ->capture_default_str();

  std::string emit_input;
  std::string emit_format = "text-table";
  std::string emit_out;
  auto* emit_cmd = app.add_subcommand("emit", "re-render a stored report CSV");
  emit_cmd->add_option("--input", emit_input, "report CSV file")->required();
  emit_cmd->add_option("--format", emit_format, "text-table or csv")
      ->capture_default_str();
  emit_cmd->add_option("--out", emit_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (scenarios_cmd->parsed()) return command_scenarios();
    if (validate_cmd->parsed()) return command_validate(validate_source);
    if (run_mpc_cmd->parsed()) {
      return command_run_mpc(mpc_source, mpc_options, mpc_lambda_fleet, mpc_seed,
                             mpc_out_dir);
    }
    if (train_cmd->parsed()) {
      return command_train_marl(marl_source, marl_options, marl_method,
                                marl_lambda_fleet, marl_seed, marl_out_dir);
    }
    if (compare_cmd->parsed()) {
      return command_compare(compare_source, compare_mpc, compare_marl, compare_methods,
                             compare_seeds, compare_lambda_fleet, compare_out_dir);
    }
    if (emit_cmd->parsed()) return command_emit(emit_input, emit_format, emit_out);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace dronefleet

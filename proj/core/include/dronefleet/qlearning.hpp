#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "dronefleet/grid_mdp.hpp"
#include "dronefleet/method.hpp"

namespace dronefleet {

// One tabular Q-learning step: q + alpha * (r + gamma * max_next - q).
double q_update(double q, double r, double max_next, double alpha, double gamma);

// Finite state-action value map. Lookups of unseen states return
// default_value and never insert.
struct QTable {
  int num_actions = 0;
  double default_value = 0.0;
  std::unordered_map<std::uint64_t, std::vector<double>> entries;

  double lookup(std::uint64_t state, int action) const;
  double max_value(std::uint64_t state) const;
  // Lowest action index among the exact maxima.
  int greedy_action(std::uint64_t state) const;
  std::vector<int> greedy_action_set(std::uint64_t state) const;
  // Adds delta to one entry, materializing the row at default_value first.
  void add(std::uint64_t state, int action, double delta);
};

struct TrainConfig {
  int episodes = 3000;  // >= 0; 0 leaves the tables untouched
  double alpha = 0.1;   // (0, 1]
  double gamma = 0.95;  // [0, 1)
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  std::uint64_t seed = 0;
  // Maximum joint-action count a JAL table may need; 5^agents beyond this is
  // rejected up front.
  std::uint64_t jal_table_budget = 1024;
};

// State keys. Per-agent keys combine the agent's cell with its own delivered
// mask (bits in the order of its assigned-building list); the joint key packs
// every agent's cell plus the global delivered mask.
std::uint64_t own_delivered_mask(const GridMDP& mdp, int agent, std::uint64_t delivered);
std::uint64_t agent_state_key(const GridMDP& mdp, int agent, Cell cell,
                              std::uint64_t delivered);
std::uint64_t joint_state_key(const GridMDP& mdp, std::span<const Cell> cells,
                              std::uint64_t delivered);

int encode_joint_action(std::span<const int> actions);
std::vector<int> decode_joint_action(int joint, int num_agents);

// Environment stepping shared by training and greedy rollout. Agents move
// simultaneously; deliveries resolve in agent-index order.
struct EnvState {
  std::vector<Cell> cells;
  std::uint64_t delivered = 0;
};

struct StepOutcome {
  std::vector<double> agent_rewards;
  double team_reward = 0.0;
  bool terminal = false;
  struct Delivery {
    int agent = 0;
    int building = 0;
  };
  std::vector<Delivery> deliveries;
};

StepOutcome step_environment(const GridMDP& mdp, EnvState& state,
                             std::span<const int> actions);

// One logged step, sufficient for every loss mode.
struct Transition {
  std::vector<std::uint64_t> agent_states;
  std::vector<std::uint64_t> agent_next_states;
  std::vector<int> actions;
  std::vector<double> agent_rewards;
  std::uint64_t joint_state = 0;
  std::uint64_t joint_next_state = 0;
  int joint_action = 0;
  double team_reward = 0.0;
  bool terminal = false;
};

// Mean squared TD error of a batch.
//   iql: per-agent errors r_i + gamma * max Q_i(s'_i) - Q_i(s_i, a_i),
//        averaged over every (transition, agent) pair
//   jal: joint-table error with the joint action
//   vdn: error of the additive joint value sum_i Q_i against the decomposed
//        target r + gamma * sum_i max Q_i(s'_i)
// Terminal transitions do not bootstrap.
double td_loss(const std::vector<QTable>& tables, std::span<const Transition> batch,
               double gamma, Method mode);

// Optional instrumentation: every table update and (for VDN) every additive
// joint-value evaluation with its per-agent parts.
struct TrainTrace {
  struct JointEval {
    double joint_value = 0.0;
    std::vector<double> parts;
  };
  std::vector<JointEval> vdn_joint_evals;
  struct UpdateRecord {
    int table = 0;
    std::uint64_t state = 0;
    int action = 0;
    double delta = 0.0;
  };
  std::vector<UpdateRecord> updates;
};

struct TrainResult {
  std::vector<QTable> tables;  // per agent; a single joint table for jal
  std::vector<double> episode_returns;
  std::vector<double> episode_td_losses;
  std::vector<double> episode_epsilons;
};

// Epsilon-greedy tabular training with a linear epsilon decay from
// epsilon_start to epsilon_end across episodes. Deterministic for a fixed
// (mdp, method, config). Episodes truncated at max_steps still bootstrap;
// genuine all-delivered terminals do not.
TrainResult train(const GridMDP& mdp, Method method, const TrainConfig& config,
                  TrainTrace* trace = nullptr);

struct RolloutResult {
  std::vector<std::vector<Cell>> paths;      // [agent][0..steps], [0] is the start
  std::vector<std::vector<int>> actions;     // [agent][0..steps-1]
  std::vector<std::vector<double>> rewards;  // [agent][0..steps-1]
  double episode_return = 0.0;
  std::vector<int> delivered_buildings;  // delivery order
  std::vector<int> deliveries_per_agent;
  int steps = 0;
  bool all_delivered = false;
};

// Executes the argmax policy (ties to the lowest action index; for jal the
// lowest joint index). Stops when everything is delivered or at max_steps.
RolloutResult greedy_rollout(const GridMDP& mdp, const std::vector<QTable>& tables,
                             Method method);

}  // namespace dronefleet

#include "dronefleet/qlearning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dronefleet/errors.hpp"
#include "dronefleet/method.hpp"

namespace dronefleet {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::mpc: return "mpc";
    case Method::iql: return "iql";
    case Method::jal: return "jal";
    case Method::vdn: return "vdn";
  }
  return "mpc";
}

Method method_from_string(std::string_view text) {
  if (text == "mpc") return Method::mpc;
  if (text == "iql") return Method::iql;
  if (text == "jal") return Method::jal;
  if (text == "vdn") return Method::vdn;
  throw ValidationError("unknown method '" + std::string(text) +
                        "' (expected mpc, iql, jal or vdn)");
}

double q_update(double q, double r, double max_next, double alpha, double gamma) {
  return q + alpha * (r + gamma * max_next - q);
}

double QTable::lookup(std::uint64_t state, int action) const {
  const auto it = entries.find(state);
  if (it == entries.end()) return default_value;
  return it->second[static_cast<std::size_t>(action)];
}

double QTable::max_value(std::uint64_t state) const {
  const auto it = entries.find(state);
  if (it == entries.end()) return default_value;
  return *std::max_element(it->second.begin(), it->second.end());
}

int QTable::greedy_action(std::uint64_t state) const {
  const auto it = entries.find(state);
  if (it == entries.end()) return 0;
  const auto& row = it->second;
  int best = 0;
  for (int a = 1; a < num_actions; ++a) {
    if (row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(best)]) best = a;
  }
  return best;
}

std::vector<int> QTable::greedy_action_set(std::uint64_t state) const {
  std::vector<int> set;
  const auto it = entries.find(state);
  if (it == entries.end()) {
    set.resize(static_cast<std::size_t>(num_actions));
    for (int a = 0; a < num_actions; ++a) set[static_cast<std::size_t>(a)] = a;
    return set;
  }
  const double best = *std::max_element(it->second.begin(), it->second.end());
  for (int a = 0; a < num_actions; ++a) {
    if (it->second[static_cast<std::size_t>(a)] == best) set.push_back(a);
  }
  return set;
}

void QTable::add(std::uint64_t state, int action, double delta) {
  auto it = entries.find(state);
  if (it == entries.end()) {
    it = entries.emplace(state, std::vector<double>(static_cast<std::size_t>(num_actions),
                                                    default_value))
             .first;
  }
  it->second[static_cast<std::size_t>(action)] += delta;
}

std::uint64_t own_delivered_mask(const GridMDP& mdp, int agent, std::uint64_t delivered) {
  std::uint64_t mask = 0;
  const auto& buildings = mdp.assigned[static_cast<std::size_t>(agent)];
  for (std::size_t bit = 0; bit < buildings.size(); ++bit) {
    if (delivered & (std::uint64_t{1} << buildings[bit])) {
      mask |= (std::uint64_t{1} << bit);
    }
  }
  return mask;
}

std::uint64_t agent_state_key(const GridMDP& mdp, int agent, Cell cell,
                              std::uint64_t delivered) {
  const std::uint64_t cells = static_cast<std::uint64_t>(mdp.num_cells());
  return own_delivered_mask(mdp, agent, delivered) * cells +
         static_cast<std::uint64_t>(mdp.cell_index(cell));
}

std::uint64_t joint_state_key(const GridMDP& mdp, std::span<const Cell> cells,
                              std::uint64_t delivered) {
  const std::uint64_t n_cells = static_cast<std::uint64_t>(mdp.num_cells());
  std::uint64_t code = 0;
  std::uint64_t stride = 1;
  for (const Cell& cell : cells) {
    code += stride * static_cast<std::uint64_t>(mdp.cell_index(cell));
    stride *= n_cells;
  }
  return delivered * stride + code;
}

int encode_joint_action(std::span<const int> actions) {
  int joint = 0;
  int stride = 1;
  for (int a : actions) {
    joint += stride * a;
    stride *= kNumActions;
  }
  return joint;
}

std::vector<int> decode_joint_action(int joint, int num_agents) {
  std::vector<int> actions(static_cast<std::size_t>(num_agents));
  for (int i = 0; i < num_agents; ++i) {
    actions[static_cast<std::size_t>(i)] = joint % kNumActions;
    joint /= kNumActions;
  }
  return actions;
}

StepOutcome step_environment(const GridMDP& mdp, EnvState& state,
                             std::span<const int> actions) {
  const int agents = mdp.num_agents();
  StepOutcome outcome;
  outcome.agent_rewards.assign(static_cast<std::size_t>(agents), -mdp.step_penalty);

  std::vector<Cell> next(static_cast<std::size_t>(agents));
  for (int i = 0; i < agents; ++i) {
    next[static_cast<std::size_t>(i)] = mdp.apply_action(
        state.cells[static_cast<std::size_t>(i)], static_cast<Action>(actions[i]));
  }
  for (int i = 0; i < agents; ++i) {
    const Cell from = state.cells[static_cast<std::size_t>(i)];
    const Cell to = next[static_cast<std::size_t>(i)];
    if (!(to == from) && mdp.is_zone(to)) {
      outcome.agent_rewards[static_cast<std::size_t>(i)] -= mdp.zone_penalty;
    }
  }
  // Deliveries resolve in agent-index order; the first arrival collects.
  for (int i = 0; i < agents; ++i) {
    const Cell to = next[static_cast<std::size_t>(i)];
    if (to == state.cells[static_cast<std::size_t>(i)]) continue;
    const auto building = mdp.building_at(to);
    if (!building) continue;
    const std::uint64_t bit = std::uint64_t{1} << *building;
    if (state.delivered & bit) continue;
    const auto& mine = mdp.assigned[static_cast<std::size_t>(i)];
    if (!std::binary_search(mine.begin(), mine.end(), *building)) continue;
    state.delivered |= bit;
    outcome.agent_rewards[static_cast<std::size_t>(i)] +=
        mdp.delivery_reward_scale * mdp.building_costs[static_cast<std::size_t>(*building)];
    outcome.deliveries.push_back({i, *building});
  }
  state.cells = std::move(next);

  for (double r : outcome.agent_rewards) outcome.team_reward += r;
  const std::uint64_t deliverable = mdp.deliverable_mask();
  outcome.terminal = (state.delivered & deliverable) == deliverable;
  return outcome;
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_int(std::mt19937_64& rng, int bound) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(bound));
}

std::uint64_t checked_pow(std::uint64_t base, int exponent, const char* what) {
  std::uint64_t value = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && value > std::numeric_limits<std::uint64_t>::max() / base) {
      throw TableBudgetError(std::string(what) + ": state/action space does not fit in "
                                                 "64-bit keys");
    }
    value *= base;
  }
  return value;
}

void check_train_config(const GridMDP& mdp, Method method, const TrainConfig& config) {
  if (!is_marl(method)) {
    throw ValidationError("train: method must be iql, jal or vdn");
  }
  if (config.episodes < 0) throw ValidationError("train: episodes must be >= 0");
  if (!(config.alpha > 0.0 && config.alpha <= 1.0)) {
    throw ValidationError("train: alpha must lie in (0, 1]");
  }
  if (!(config.gamma >= 0.0 && config.gamma < 1.0)) {
    throw ValidationError("train: gamma must lie in [0, 1)");
  }
  if (!(config.epsilon_start >= config.epsilon_end && config.epsilon_end >= 0.0) ||
      config.epsilon_start > 1.0) {
    throw ValidationError("train: need 1 >= epsilon_start >= epsilon_end >= 0");
  }
  const int agents = mdp.num_agents();
  if (agents < 1) throw ValidationError("train: mdp has no agents");

  if (method == Method::jal) {
    const std::uint64_t joint_actions =
        checked_pow(static_cast<std::uint64_t>(kNumActions), agents, "train(jal)");
    if (joint_actions > config.jal_table_budget) {
      std::ostringstream msg;
      msg << "train(jal): " << kNumActions << "^" << agents << " = " << joint_actions
          << " joint actions per state exceeds the table budget of "
          << config.jal_table_budget
          << "; the joint table grows exponentially with the agent count";
      throw TableBudgetError(msg.str());
    }
    // The joint state key must also pack: cells^agents * 2^buildings.
    const std::uint64_t cell_codes =
        checked_pow(static_cast<std::uint64_t>(mdp.num_cells()), agents, "train(jal)");
    const std::uint64_t masks = checked_pow(
        2, static_cast<int>(mdp.building_cells.size()), "train(jal)");
    if (masks != 0 && cell_codes > std::numeric_limits<std::uint64_t>::max() / masks) {
      throw TableBudgetError("train(jal): joint state space does not fit in 64-bit keys");
    }
  }
}

double epsilon_for_episode(const TrainConfig& config, int episode) {
  if (config.episodes <= 1) return config.epsilon_start;
  const double t = static_cast<double>(episode) / static_cast<double>(config.episodes - 1);
  return config.epsilon_start + (config.epsilon_end - config.epsilon_start) * t;
}

void record_update(TrainTrace* trace, int table, std::uint64_t state, int action,
                   double delta) {
  if (trace) trace->updates.push_back({table, state, action, delta});
}

}  // namespace

double td_loss(const std::vector<QTable>& tables, std::span<const Transition> batch,
               double gamma, Method mode) {
  if (batch.empty()) throw ValidationError("td_loss: batch must be non-empty");
  double sum = 0.0;
  std::size_t count = 0;
  for (const Transition& t : batch) {
    switch (mode) {
      case Method::iql: {
        for (std::size_t i = 0; i < t.agent_states.size(); ++i) {
          const QTable& q = tables[i];
          const double bootstrap = t.terminal ? 0.0 : gamma * q.max_value(t.agent_next_states[i]);
          const double delta =
              t.agent_rewards[i] + bootstrap - q.lookup(t.agent_states[i], t.actions[i]);
          sum += delta * delta;
          ++count;
        }
        break;
      }
      case Method::jal: {
        const QTable& q = tables[0];
        const double bootstrap = t.terminal ? 0.0 : gamma * q.max_value(t.joint_next_state);
        const double delta =
            t.team_reward + bootstrap - q.lookup(t.joint_state, t.joint_action);
        sum += delta * delta;
        ++count;
        break;
      }
      case Method::vdn: {
        double prediction = 0.0;
        double next_joint = 0.0;
        for (std::size_t i = 0; i < t.agent_states.size(); ++i) {
          prediction += tables[i].lookup(t.agent_states[i], t.actions[i]);
          next_joint += tables[i].max_value(t.agent_next_states[i]);
        }
        const double bootstrap = t.terminal ? 0.0 : gamma * next_joint;
        const double delta = t.team_reward + bootstrap - prediction;
        sum += delta * delta;
        ++count;
        break;
      }
      case Method::mpc:
        throw ValidationError("td_loss: mode must be iql, jal or vdn");
    }
  }
  return sum / static_cast<double>(count);
}

TrainResult train(const GridMDP& mdp, Method method, const TrainConfig& config,
                  TrainTrace* trace) {
  check_train_config(mdp, method, config);

  const int agents = mdp.num_agents();
  const int joint_actions =
      method == Method::jal
          ? static_cast<int>(checked_pow(kNumActions, agents, "train(jal)"))
          : kNumActions;

  TrainResult result;
  if (method == Method::jal) {
    result.tables.push_back(QTable{joint_actions, 0.0, {}});
  } else {
    for (int i = 0; i < agents; ++i) result.tables.push_back(QTable{kNumActions, 0.0, {}});
  }

  std::mt19937_64 rng(config.seed);
  std::vector<int> actions(static_cast<std::size_t>(agents));

  for (int episode = 0; episode < config.episodes; ++episode) {
    const double epsilon = epsilon_for_episode(config, episode);
    EnvState state{mdp.starts, 0};
    double episode_return = 0.0;
    double squared_error_sum = 0.0;
    std::size_t error_count = 0;

    for (int step = 0; step < mdp.max_steps; ++step) {
      // Per-agent state keys before acting.
      std::vector<std::uint64_t> keys(static_cast<std::size_t>(agents));
      for (int i = 0; i < agents; ++i) {
        keys[static_cast<std::size_t>(i)] =
            agent_state_key(mdp, i, state.cells[static_cast<std::size_t>(i)],
                            state.delivered);
      }
      const std::uint64_t joint_key =
          method == Method::jal ? joint_state_key(mdp, state.cells, state.delivered) : 0;

      int joint_action = 0;
      if (method == Method::jal) {
        joint_action = uniform01(rng) < epsilon
                           ? uniform_int(rng, joint_actions)
                           : result.tables[0].greedy_action(joint_key);
        actions = decode_joint_action(joint_action, agents);
      } else {
        for (int i = 0; i < agents; ++i) {
          actions[static_cast<std::size_t>(i)] =
              uniform01(rng) < epsilon
                  ? uniform_int(rng, kNumActions)
                  : result.tables[static_cast<std::size_t>(i)].greedy_action(
                        keys[static_cast<std::size_t>(i)]);
        }
      }

      const StepOutcome outcome = step_environment(mdp, state, actions);
      episode_return += outcome.team_reward;
      const bool bootstrap = !outcome.terminal;  // truncation at max_steps bootstraps

      if (method == Method::iql) {
        for (int i = 0; i < agents; ++i) {
          QTable& q = result.tables[static_cast<std::size_t>(i)];
          const std::uint64_t next_key = agent_state_key(
              mdp, i, state.cells[static_cast<std::size_t>(i)], state.delivered);
          const double target =
              outcome.agent_rewards[static_cast<std::size_t>(i)] +
              (bootstrap ? config.gamma * q.max_value(next_key) : 0.0);
          const double delta =
              target - q.lookup(keys[static_cast<std::size_t>(i)],
                                actions[static_cast<std::size_t>(i)]);
          q.add(keys[static_cast<std::size_t>(i)], actions[static_cast<std::size_t>(i)],
                config.alpha * delta);
          record_update(trace, i, keys[static_cast<std::size_t>(i)],
                        actions[static_cast<std::size_t>(i)], config.alpha * delta);
          squared_error_sum += delta * delta;
          ++error_count;
        }
      } else if (method == Method::jal) {
        QTable& q = result.tables[0];
        const std::uint64_t next_key = joint_state_key(mdp, state.cells, state.delivered);
        const double target =
            outcome.team_reward + (bootstrap ? config.gamma * q.max_value(next_key) : 0.0);
        const double delta = target - q.lookup(joint_key, joint_action);
        q.add(joint_key, joint_action, config.alpha * delta);
        record_update(trace, 0, joint_key, joint_action, config.alpha * delta);
        squared_error_sum += delta * delta;
        ++error_count;
      } else {  // vdn
        double prediction = 0.0;
        double next_joint = 0.0;
        TrainTrace::JointEval prediction_eval;
        TrainTrace::JointEval target_eval;
        std::vector<std::uint64_t> next_keys(static_cast<std::size_t>(agents));
        for (int i = 0; i < agents; ++i) {
          const double part = result.tables[static_cast<std::size_t>(i)].lookup(
              keys[static_cast<std::size_t>(i)], actions[static_cast<std::size_t>(i)]);
          prediction += part;
          if (trace) prediction_eval.parts.push_back(part);
          next_keys[static_cast<std::size_t>(i)] = agent_state_key(
              mdp, i, state.cells[static_cast<std::size_t>(i)], state.delivered);
          const double next_part = result.tables[static_cast<std::size_t>(i)].max_value(
              next_keys[static_cast<std::size_t>(i)]);
          next_joint += next_part;
          if (trace) target_eval.parts.push_back(next_part);
        }
        if (trace) {
          prediction_eval.joint_value = prediction;
          target_eval.joint_value = next_joint;
          trace->vdn_joint_evals.push_back(prediction_eval);
          trace->vdn_joint_evals.push_back(target_eval);
        }
        const double target =
            outcome.team_reward + (bootstrap ? config.gamma * next_joint : 0.0);
        const double delta = target - prediction;
        for (int i = 0; i < agents; ++i) {
          result.tables[static_cast<std::size_t>(i)].add(
              keys[static_cast<std::size_t>(i)], actions[static_cast<std::size_t>(i)],
              config.alpha * delta);
          record_update(trace, i, keys[static_cast<std::size_t>(i)],
                        actions[static_cast<std::size_t>(i)], config.alpha * delta);
        }
        squared_error_sum += delta * delta;
        ++error_count;
      }

      if (outcome.terminal) break;
    }

    result.episode_returns.push_back(episode_return);
    result.episode_td_losses.push_back(
        error_count == 0 ? 0.0 : squared_error_sum / static_cast<double>(error_count));
    result.episode_epsilons.push_back(epsilon);
  }
  return result;
}

RolloutResult greedy_rollout(const GridMDP& mdp, const std::vector<QTable>& tables,
                             Method method) {
  if (!is_marl(method)) {
    throw ValidationError("greedy_rollout: method must be iql, jal or vdn");
  }
  const int agents = mdp.num_agents();
  RolloutResult result;
  result.paths.resize(static_cast<std::size_t>(agents));
  result.actions.resize(static_cast<std::size_t>(agents));
  result.rewards.resize(static_cast<std::size_t>(agents));
  result.deliveries_per_agent.assign(static_cast<std::size_t>(agents), 0);

  EnvState state{mdp.starts, 0};
  for (int i = 0; i < agents; ++i) {
    result.paths[static_cast<std::size_t>(i)].push_back(
        state.cells[static_cast<std::size_t>(i)]);
  }

  std::vector<int> actions(static_cast<std::size_t>(agents));
  for (int step = 0; step < mdp.max_steps; ++step) {
    if (method == Method::jal) {
      const std::uint64_t joint_key = joint_state_key(mdp, state.cells, state.delivered);
      actions = decode_joint_action(tables[0].greedy_action(joint_key), agents);
    } else {
      for (int i = 0; i < agents; ++i) {
        const std::uint64_t key = agent_state_key(
            mdp, i, state.cells[static_cast<std::size_t>(i)], state.delivered);
        actions[static_cast<std::size_t>(i)] =
            tables[static_cast<std::size_t>(i)].greedy_action(key);
      }
    }

    const StepOutcome outcome = step_environment(mdp, state, actions);
    result.episode_return += outcome.team_reward;
    ++result.steps;
    for (int i = 0; i < agents; ++i) {
      result.paths[static_cast<std::size_t>(i)].push_back(
          state.cells[static_cast<std::size_t>(i)]);
      result.actions[static_cast<std::size_t>(i)].push_back(
          actions[static_cast<std::size_t>(i)]);
      result.rewards[static_cast<std::size_t>(i)].push_back(
          outcome.agent_rewards[static_cast<std::size_t>(i)]);
    }
    for (const auto& delivery : outcome.deliveries) {
      result.delivered_buildings.push_back(delivery.building);
      ++result.deliveries_per_agent[static_cast<std::size_t>(delivery.agent)];
    }
    if (outcome.terminal) {
      result.all_delivered = true;
      break;
    }
  }
  return result;
}

}  // namespace dronefleet

#pragma once

// Shared test utilities and the independent oracles the suites check the
// implementation against. Everything here is deliberately written with plain
// loops and std::hypot/std::sqrt so it does not share code paths with the
// library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "dronefleet/costs.hpp"
#include "dronefleet/errors.hpp"
#include "dronefleet/grid_mdp.hpp"
#include "dronefleet/optimizer.hpp"
#include "dronefleet/qlearning.hpp"
#include "dronefleet/scenario.hpp"
#include "dronefleet/trajectory.hpp"

namespace test_support {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive bounds
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// ---------------------------------------------------------------------------
// Brute-force cost oracles (independent triple loops).

inline double oracle_delivery_cost(const std::vector<dronefleet::DroneTrajectory>& ts,
                                   const std::vector<dronefleet::Building>& buildings) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double fx = ts[i].states.back().x();
    const double fy = ts[i].states.back().y();
    for (std::size_t j = 0; j < buildings.size(); ++j) {
      sum += buildings[j].cost *
             std::hypot(fx - buildings[j].position.x(), fy - buildings[j].position.y());
    }
  }
  return sum;
}

inline double oracle_restricted_cost(const std::vector<dronefleet::DroneTrajectory>& ts,
                                     const std::vector<dronefleet::RestrictedZone>& zones,
                                     double d_min) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t t = 1; t < ts[i].states.size(); ++t) {
      for (std::size_t k = 0; k < zones.size(); ++k) {
        const double d = std::hypot(ts[i].states[t].x() - zones[k].position.x(),
                                    ts[i].states[t].y() - zones[k].position.y());
        if (d < d_min) sum += d_min - d;
      }
    }
  }
  return sum;
}

inline double oracle_control_penalty(const std::vector<dronefleet::DroneTrajectory>& ts,
                                     double lambda_ctrl) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t t = 1; t < ts[i].controls.size(); ++t) {
      const double ux = ts[i].controls[t].x();
      const double uy = ts[i].controls[t].y();
      sum += ux * ux + uy * uy;
    }
  }
  return lambda_ctrl * sum;
}

inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// ---------------------------------------------------------------------------
// Central finite differences of the total cost over free states and controls.
// The differenced objective is an independent long-double re-evaluation of
// the three cost terms, which keeps the rounding noise of the J(x+h)-J(x-h)
// subtraction well below the gradient tolerance (J is ~550 on env1; a plain
// double evaluation leaves ~1e-6 of absolute noise on the quotient).

inline long double oracle_total_cost_ld(const dronefleet::Scenario& scenario,
                                        const std::vector<dronefleet::DroneTrajectory>& ts,
                                        double lambda_ctrl) {
  long double delivery = 0.0L;
  long double restricted = 0.0L;
  long double penalty = 0.0L;
  for (const auto& t : ts) {
    const long double fx = t.states.back().x();
    const long double fy = t.states.back().y();
    for (const auto& b : scenario.buildings) {
      const long double dx = fx - static_cast<long double>(b.position.x());
      const long double dy = fy - static_cast<long double>(b.position.y());
      delivery += static_cast<long double>(b.cost) * std::sqrt(dx * dx + dy * dy);
    }
    for (std::size_t k = 1; k < t.states.size(); ++k) {
      for (const auto& zone : scenario.zones) {
        const long double dx = static_cast<long double>(t.states[k].x()) -
                               static_cast<long double>(zone.position.x());
        const long double dy = static_cast<long double>(t.states[k].y()) -
                               static_cast<long double>(zone.position.y());
        const long double d = std::sqrt(dx * dx + dy * dy);
        if (d < static_cast<long double>(scenario.d_min)) {
          restricted += static_cast<long double>(scenario.d_min) - d;
        }
      }
    }
    for (std::size_t k = 1; k < t.controls.size(); ++k) {
      const long double ux = t.controls[k].x();
      const long double uy = t.controls[k].y();
      penalty += ux * ux + uy * uy;
    }
  }
  return delivery + restricted + static_cast<long double>(lambda_ctrl) * penalty;
}

struct GradientCheck {
  // Components large enough for a meaningful quotient are compared
  // relatively; near-zero components absolutely.
  double max_relative_error = 0.0;   // over components >= small_threshold
  double max_small_abs_error = 0.0;  // over components < small_threshold
  double small_threshold = 1e-2;
  int components = 0;
};

inline GradientCheck finite_difference_check(const dronefleet::Scenario& scenario,
                                             std::vector<dronefleet::DroneTrajectory> ts,
                                             double lambda_ctrl, double h = 1e-6) {
  const dronefleet::CostGradients grads =
      dronefleet::grad_total_cost(scenario, ts, lambda_ctrl);

  GradientCheck check;
  auto probe = [&](double* coordinate, double analytic) {
    const double saved = *coordinate;
    *coordinate = saved + h;
    const long double plus = oracle_total_cost_ld(scenario, ts, lambda_ctrl);
    *coordinate = saved - h;
    const long double minus = oracle_total_cost_ld(scenario, ts, lambda_ctrl);
    *coordinate = saved;
    const double numeric = static_cast<double>((plus - minus) / (2.0L * h));
    if (std::max(std::abs(analytic), std::abs(numeric)) >= check.small_threshold) {
      check.max_relative_error =
          std::max(check.max_relative_error, relative_error(analytic, numeric));
    } else {
      check.max_small_abs_error =
          std::max(check.max_small_abs_error, std::abs(analytic - numeric));
    }
    ++check.components;
  };

  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t t = 0; t < ts[i].states.size(); ++t) {
      probe(&ts[i].states[t].x(), grads.state_grads[i][t].x());
      probe(&ts[i].states[t].y(), grads.state_grads[i][t].y());
    }
    for (std::size_t t = 0; t < ts[i].controls.size(); ++t) {
      probe(&ts[i].controls[t].x(), grads.control_grads[i][t].x());
      probe(&ts[i].controls[t].y(), grads.control_grads[i][t].y());
    }
  }
  return check;
}

// Random env1 configuration keeping every state at least `margin` away from
// hinge boundaries and coincidences, so the finite-difference stencil never
// crosses a kink.
inline std::vector<dronefleet::DroneTrajectory> margin_safe_configuration(
    const dronefleet::Scenario& scenario, std::mt19937_64& rng, double margin = 1e-3) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<dronefleet::DroneTrajectory> ts;
    for (const auto& start : scenario.drone_starts) {
      std::vector<Eigen::Vector2d> controls(static_cast<std::size_t>(scenario.horizon));
      for (auto& u : controls) {
        u.x() = uniform(rng, -0.4, 0.4);
        u.y() = uniform(rng, -0.4, 0.4);
      }
      ts.push_back(dronefleet::rollout(scenario.A, scenario.B, start, controls));
    }
    bool safe = true;
    for (const auto& trajectory : ts) {
      for (std::size_t t = 1; t < trajectory.states.size() && safe; ++t) {
        for (const auto& zone : scenario.zones) {
          const double d = (trajectory.states[t] - zone.position).norm();
          if (d < margin || std::abs(d - scenario.d_min) < margin) {
            safe = false;
            break;
          }
        }
      }
      for (const auto& building : scenario.buildings) {
        if ((trajectory.states.back() - building.position).norm() < margin) safe = false;
      }
      if (!safe) break;
    }
    if (safe) return ts;
  }
  throw std::runtime_error("margin_safe_configuration: no safe draw in 1000 attempts");
}

// ---------------------------------------------------------------------------
// Halving search for a descent-stable learning rate.

inline double discover_stable_alpha(const dronefleet::Scenario& scenario,
                                    dronefleet::OptimizerConfig base, int iterations,
                                    double tolerance = 1e-9) {
  double alpha = 0.25;
  for (int attempt = 0; attempt < 40; ++attempt, alpha *= 0.5) {
    dronefleet::OptimizerConfig config = base;
    config.learning_rate = alpha;
    config.max_iterations = iterations;
    config.convergence_epsilon = 0.0;  // observe every iteration
    try {
      const auto result = dronefleet::optimize(scenario, config);
      bool monotone = true;
      for (std::size_t i = 1; i < result.cost_history.size(); ++i) {
        if (result.cost_history[i].total >
            result.cost_history[i - 1].total + tolerance) {
          monotone = false;
          break;
        }
      }
      if (monotone) return alpha;
    } catch (const dronefleet::DivergenceError&) {
      // halve and retry
    }
  }
  throw std::runtime_error("discover_stable_alpha: no stable learning rate found");
}

// ---------------------------------------------------------------------------
// Exhaustive fleet-selection oracle (recursive subset enumeration).

struct FleetOracleResult {
  std::vector<int> subset;
  double objective = 0.0;
};

inline FleetOracleResult fleet_brute_force(
    const dronefleet::Scenario& scenario, double lambda_fleet,
    const std::function<double(int, const std::vector<int>&)>& drone_cost) {
  const int n = static_cast<int>(scenario.drone_starts.size());
  FleetOracleResult best;
  bool have = false;

  std::vector<int> subset;
  auto evaluate = [&]() {
    if (subset.empty()) return;
    std::map<int, std::vector<int>> groups;
    for (std::size_t j = 0; j < scenario.buildings.size(); ++j) {
      int chosen = subset[0];
      double chosen_d = std::hypot(
          scenario.drone_starts[chosen].x() - scenario.buildings[j].position.x(),
          scenario.drone_starts[chosen].y() - scenario.buildings[j].position.y());
      for (int drone : subset) {
        const double d = std::hypot(
            scenario.drone_starts[drone].x() - scenario.buildings[j].position.x(),
            scenario.drone_starts[drone].y() - scenario.buildings[j].position.y());
        if (d < chosen_d) {
          chosen = drone;
          chosen_d = d;
        }
      }
      groups[chosen].push_back(static_cast<int>(j));
    }
    double delivery = 0.0;
    for (const auto& [drone, buildings] : groups) {
      delivery += drone_cost(drone, buildings);
    }
    const double objective = delivery + lambda_fleet * static_cast<double>(subset.size());
    const bool better = !have || objective < best.objective ||
                        (objective == best.objective &&
                         (subset.size() < best.subset.size() ||
                          (subset.size() == best.subset.size() && subset < best.subset)));
    if (better) {
      best.subset = subset;
      best.objective = objective;
      have = true;
    }
  };

  std::function<void(int)> recurse = [&](int drone) {
    if (drone == n) {
      evaluate();
      return;
    }
    recurse(drone + 1);
    subset.push_back(drone);
    recurse(drone + 1);
    subset.pop_back();
  };
  recurse(0);
  std::sort(best.subset.begin(), best.subset.end());
  return best;
}

// Shortest Hamiltonian path over all permutations (M <= 8).
inline double shortest_hamiltonian_path(const Eigen::Vector2d& start,
                                        const std::vector<Eigen::Vector2d>& points) {
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double length = 0.0;
    Eigen::Vector2d at = start;
    for (int idx : order) {
      length += (points[static_cast<std::size_t>(idx)] - at).norm();
      at = points[static_cast<std::size_t>(idx)];
    }
    best = std::min(best, length);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

inline double tour_length(const Eigen::Vector2d& start,
                          const std::vector<Eigen::Vector2d>& points) {
  double length = 0.0;
  Eigen::Vector2d at = start;
  for (const auto& p : points) {
    length += (p - at).norm();
    at = p;
  }
  return length;
}

// ---------------------------------------------------------------------------
// Random scenarios for property tests.

inline dronefleet::Scenario random_scenario(std::mt19937_64& rng, int max_drones = 4,
                                            int max_buildings = 6, int max_zones = 3) {
  dronefleet::Scenario s;
  s.name = "random" + std::to_string(rng() % 100000);
  const int drones = uniform_int(rng, 1, max_drones);
  const int buildings = uniform_int(rng, 1, max_buildings);
  const int zones = uniform_int(rng, 0, max_zones);
  s.d_min = uniform(rng, 0.3, 1.5);
  s.lambda = uniform(rng, 0.0, 20.0);
  s.horizon = uniform_int(rng, 1, 12);
  for (int j = 0; j < buildings; ++j) {
    dronefleet::Building b;
    b.position = {uniform(rng, 0.0, 20.0), uniform(rng, 0.0, 20.0)};
    b.kind = static_cast<dronefleet::BuildingKind>(uniform_int(rng, 0, 3));
    b.cost = uniform(rng, 0.0, 5.0);
    s.buildings.push_back(b);
  }
  for (int k = 0; k < zones; ++k) {
    s.zones.push_back({{uniform(rng, 0.0, 20.0), uniform(rng, 0.0, 20.0)}});
  }
  while (static_cast<int>(s.drone_starts.size()) < drones) {
    Eigen::Vector2d start(uniform(rng, 0.0, 20.0), uniform(rng, 0.0, 20.0));
    bool clear = true;
    for (const auto& zone : s.zones) {
      if ((start - zone.position).norm() < s.d_min) clear = false;
    }
    if (clear) s.drone_starts.push_back(start);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Value iteration on a single-agent GridMDP; mirrors step_environment's
// reward and termination rules independently.

class ValueIterationOracle {
 public:
  explicit ValueIterationOracle(const dronefleet::GridMDP& mdp, double gamma)
      : mdp_(mdp), gamma_(gamma) {
    const std::size_t masks = std::size_t{1} << mdp.assigned[0].size();
    const std::size_t cells = static_cast<std::size_t>(mdp.num_cells());
    q_.assign(masks * cells,
              std::vector<double>(static_cast<std::size_t>(dronefleet::kNumActions), 0.0));
    solve();
  }

  std::size_t state_index(dronefleet::Cell cell, std::uint64_t mask) const {
    return static_cast<std::size_t>(mask) * static_cast<std::size_t>(mdp_.num_cells()) +
           static_cast<std::size_t>(mdp_.cell_index(cell));
  }

  bool terminal_mask(std::uint64_t mask) const {
    return mask + 1 == (std::uint64_t{1} << mdp_.assigned[0].size());
  }

  const std::vector<double>& q_values(dronefleet::Cell cell, std::uint64_t mask) const {
    return q_[state_index(cell, mask)];
  }

  std::vector<int> optimal_actions(dronefleet::Cell cell, std::uint64_t mask,
                                   double tolerance = 1e-9) const {
    const auto& row = q_values(cell, mask);
    const double best = *std::max_element(row.begin(), row.end());
    std::vector<int> actions;
    for (int a = 0; a < dronefleet::kNumActions; ++a) {
      if (row[static_cast<std::size_t>(a)] >= best - tolerance) actions.push_back(a);
    }
    return actions;
  }

  // Reachable non-terminal (cell, mask) states from the start.
  std::vector<std::pair<dronefleet::Cell, std::uint64_t>> reachable_states() const {
    std::vector<std::pair<dronefleet::Cell, std::uint64_t>> out;
    std::vector<char> seen(q_.size(), 0);
    std::vector<std::pair<dronefleet::Cell, std::uint64_t>> frontier;
    frontier.emplace_back(mdp_.starts[0], 0);
    seen[state_index(mdp_.starts[0], 0)] = 1;
    while (!frontier.empty()) {
      auto [cell, mask] = frontier.back();
      frontier.pop_back();
      if (terminal_mask(mask)) continue;
      out.emplace_back(cell, mask);
      for (int a = 0; a < dronefleet::kNumActions; ++a) {
        auto [next, reward, next_mask] = transition(cell, mask, a);
        (void)reward;
        const std::size_t idx = state_index(next, next_mask);
        if (!seen[idx]) {
          seen[idx] = 1;
          frontier.emplace_back(next, next_mask);
        }
      }
    }
    return out;
  }

  std::tuple<dronefleet::Cell, double, std::uint64_t> transition(dronefleet::Cell cell,
                                                                 std::uint64_t mask,
                                                                 int action) const {
    dronefleet::Cell next = cell;
    switch (action) {
      case 0: next.row += 1; break;
      case 1: next.row -= 1; break;
      case 2: next.col -= 1; break;
      case 3: next.col += 1; break;
      default: break;
    }
    if (next.col < 0 || next.col >= mdp_.width || next.row < 0 || next.row >= mdp_.height) {
      next = cell;
    }
    double reward = -mdp_.step_penalty;
    std::uint64_t next_mask = mask;
    const bool moved = !(next == cell);
    if (moved && mdp_.is_zone(next)) reward -= mdp_.zone_penalty;
    if (moved) {
      const auto building = mdp_.building_at(next);
      if (building) {
        const auto& mine = mdp_.assigned[0];
        for (std::size_t bit = 0; bit < mine.size(); ++bit) {
          if (mine[bit] == *building && !(mask & (std::uint64_t{1} << bit))) {
            next_mask |= (std::uint64_t{1} << bit);
            reward += mdp_.delivery_reward_scale *
                      mdp_.building_costs[static_cast<std::size_t>(*building)];
          }
        }
      }
    }
    return {next, reward, next_mask};
  }

 private:
  void solve() {
    const std::size_t masks = std::size_t{1} << mdp_.assigned[0].size();
    for (int sweep = 0; sweep < 100000; ++sweep) {
      double change = 0.0;
      auto next_q = q_;
      for (std::uint64_t mask = 0; mask < masks; ++mask) {
        if (terminal_mask(mask)) continue;
        for (int row = 0; row < mdp_.height; ++row) {
          for (int col = 0; col < mdp_.width; ++col) {
            const dronefleet::Cell cell{col, row};
            for (int a = 0; a < dronefleet::kNumActions; ++a) {
              auto [next, reward, next_mask] = transition(cell, mask, a);
              double value = reward;
              if (!terminal_mask(next_mask)) {
                const auto& next_row = q_[state_index(next, next_mask)];
                value += gamma_ * *std::max_element(next_row.begin(), next_row.end());
              }
              auto& slot =
                  next_q[state_index(cell, mask)][static_cast<std::size_t>(a)];
              change = std::max(change, std::abs(slot - value));
              slot = value;
            }
          }
        }
      }
      q_ = std::move(next_q);
      if (change < 1e-12) return;
    }
  }

  const dronefleet::GridMDP& mdp_;
  double gamma_;
  std::vector<std::vector<double>> q_;
};

}  // namespace test_support

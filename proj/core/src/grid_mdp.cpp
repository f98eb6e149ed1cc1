#include "dronefleet/grid_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dronefleet/errors.hpp"

namespace dronefleet {

bool GridMDP::is_zone(Cell c) const { return zone_lookup_[cell_index(c)] != 0; }

std::optional<int> GridMDP::building_at(Cell c) const {
  const int j = building_lookup_[cell_index(c)];
  if (j < 0) return std::nullopt;
  return j;
}

Cell GridMDP::apply_action(Cell c, Action a) const {
  Cell next = c;
  switch (a) {
    case Action::up: next.row += 1; break;
    case Action::down: next.row -= 1; break;
    case Action::left: next.col -= 1; break;
    case Action::right: next.col += 1; break;
    case Action::stay: break;
  }
  return in_bounds(next) ? next : c;
}

std::uint64_t GridMDP::deliverable_mask() const {
  std::uint64_t mask = 0;
  for (const auto& buildings : assigned) {
    for (int j : buildings) mask |= (std::uint64_t{1} << j);
  }
  return mask;
}

namespace {

Cell round_cell(const Eigen::Vector2d& position, const std::string& what) {
  const long col = std::lround(position.x());
  const long row = std::lround(position.y());
  if (col < 0 || row < 0) {
    std::ostringstream msg;
    msg << "discretize: " << what << " rounds to negative cell (" << col << ", " << row
        << ")";
    throw ValidationError(msg.str());
  }
  return {static_cast<int>(col), static_cast<int>(row)};
}

}  // namespace

GridMDP discretize(const Scenario& scenario,
                   const std::optional<std::vector<int>>& assignment,
                   const GridRewardConfig& rewards) {
  if (auto violations = validate(scenario); !violations.empty()) {
    std::ostringstream msg;
    msg << "discretize: scenario failed validation:";
    for (const auto& v : violations) msg << "\n  - " << v;
    throw ValidationError(msg.str());
  }
  if (scenario.buildings.size() > 63) {
    throw ValidationError("discretize: at most 63 buildings supported (delivered sets "
                          "are 64-bit masks)");
  }

  GridMDP mdp;
  mdp.step_penalty = rewards.step_penalty;
  mdp.zone_penalty = rewards.zone_penalty;
  mdp.delivery_reward_scale = rewards.delivery_reward_scale;

  for (std::size_t j = 0; j < scenario.buildings.size(); ++j) {
    mdp.building_cells.push_back(round_cell(scenario.buildings[j].position,
                                            "buildings[" + std::to_string(j) + "]"));
    mdp.building_costs.push_back(scenario.buildings[j].cost);
  }
  for (std::size_t k = 0; k < scenario.zones.size(); ++k) {
    mdp.zone_cells.push_back(
        round_cell(scenario.zones[k].position, "zones[" + std::to_string(k) + "]"));
  }
  for (std::size_t i = 0; i < scenario.drone_starts.size(); ++i) {
    mdp.starts.push_back(round_cell(scenario.drone_starts[i],
                                    "drone_starts[" + std::to_string(i) + "]"));
  }

  int max_col = 0;
  int max_row = 0;
  auto grow = [&max_col, &max_row](Cell c) {
    max_col = std::max(max_col, c.col);
    max_row = std::max(max_row, c.row);
  };
  for (Cell c : mdp.building_cells) grow(c);
  for (Cell c : mdp.zone_cells) grow(c);
  for (Cell c : mdp.starts) grow(c);
  mdp.width = max_col + 1;
  mdp.height = max_row + 1;
  mdp.max_steps = rewards.max_steps > 0 ? rewards.max_steps : 2 * mdp.width * mdp.height;

  mdp.building_lookup_.assign(static_cast<std::size_t>(mdp.num_cells()), -1);
  mdp.zone_lookup_.assign(static_cast<std::size_t>(mdp.num_cells()), 0);
  for (std::size_t j = 0; j < mdp.building_cells.size(); ++j) {
    int& slot = mdp.building_lookup_[mdp.cell_index(mdp.building_cells[j])];
    if (slot >= 0) {
      std::ostringstream msg;
      msg << "discretize: buildings[" << slot << "] and buildings[" << j
          << "] both round to cell (" << mdp.building_cells[j].col << ", "
          << mdp.building_cells[j].row << ")";
      throw ValidationError(msg.str());
    }
    slot = static_cast<int>(j);
  }
  for (Cell c : mdp.zone_cells) mdp.zone_lookup_[mdp.cell_index(c)] = 1;

  const int agents = mdp.num_agents();
  mdp.assigned.resize(agents);
  if (assignment) {
    if (assignment->size() != scenario.buildings.size()) {
      throw ValidationError("discretize: assignment must name one agent per building");
    }
    for (std::size_t j = 0; j < assignment->size(); ++j) {
      const int agent = (*assignment)[j];
      if (agent < 0 || agent >= agents) {
        throw ValidationError("discretize: assignment[" + std::to_string(j) +
                              "] names agent " + std::to_string(agent) +
                              " out of range");
      }
      mdp.assigned[agent].push_back(static_cast<int>(j));
    }
  } else {
    for (auto& buildings : mdp.assigned) {
      buildings.resize(scenario.buildings.size());
      for (std::size_t j = 0; j < buildings.size(); ++j) {
        buildings[j] = static_cast<int>(j);
      }
    }
  }
  return mdp;
}

}  // namespace dronefleet

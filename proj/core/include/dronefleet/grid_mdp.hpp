#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dronefleet/scenario.hpp"

namespace dronefleet {

struct Cell {
  int col = 0;
  int row = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

enum class Action : int { up = 0, down = 1, left = 2, right = 3, stay = 4 };
inline constexpr int kNumActions = 5;

struct GridRewardConfig {
  double step_penalty = 0.1;
  double zone_penalty = 5.0;
  double delivery_reward_scale = 10.0;
  int max_steps = 0;  // 0: use 2 * width * height
};

// Discrete delivery world. Agents move simultaneously on a width x height
// grid; off-grid moves are no-ops. Entering an undelivered building cell the
// agent is assigned to yields +delivery_reward_scale * c_j, entering a zone
// cell costs zone_penalty, and every step costs step_penalty. An episode ends
// when every deliverable building is delivered or after max_steps.
struct GridMDP {
  int width = 0;
  int height = 0;
  std::vector<Cell> building_cells;  // scenario building order
  std::vector<double> building_costs;
  std::vector<Cell> zone_cells;
  std::vector<Cell> starts;  // one per agent
  // Buildings each agent may deliver (ascending). With a shared task every
  // agent lists every building.
  std::vector<std::vector<int>> assigned;
  double step_penalty = 0.1;
  double zone_penalty = 5.0;
  double delivery_reward_scale = 10.0;
  int max_steps = 0;

  int num_agents() const { return static_cast<int>(starts.size()); }
  int num_cells() const { return width * height; }
  int cell_index(Cell c) const { return c.row * width + c.col; }
  bool in_bounds(Cell c) const {
    return c.col >= 0 && c.col < width && c.row >= 0 && c.row < height;
  }
  bool is_zone(Cell c) const;
  std::optional<int> building_at(Cell c) const;
  Cell apply_action(Cell c, Action a) const;  // off-grid moves stay put

  // All buildings some agent may deliver, as a bitmask over building indices.
  std::uint64_t deliverable_mask() const;

 private:
  friend GridMDP discretize(const Scenario&, const std::optional<std::vector<int>>&,
                            const GridRewardConfig&);
  std::vector<int> building_lookup_;  // cell index -> building index or -1
  std::vector<char> zone_lookup_;     // cell index -> 0/1
};

// Rounds every position to its nearest integer cell. Grid bounds are the
// maximum rounded coordinate + 1 per axis over buildings, zones and starts.
// `assignment` maps building index -> agent index; when absent every agent
// may deliver every building. Throws ValidationError when the scenario fails
// validate(), when two buildings round to the same cell (naming both), or
// when a position rounds to a negative cell.
GridMDP discretize(const Scenario& scenario,
                   const std::optional<std::vector<int>>& assignment = std::nullopt,
                   const GridRewardConfig& rewards = {});

}  // namespace dronefleet

#pragma once

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

namespace dronefleet {

enum class BuildingKind { home, office, shop, custom };

std::string_view to_string(BuildingKind kind);
BuildingKind building_kind_from_string(std::string_view text);

// A delivery target. The kind is metadata; all cost logic reads `cost`.
struct Building {
  Eigen::Vector2d position{0.0, 0.0};
  BuildingKind kind = BuildingKind::custom;
  double cost = 0.0;
};

// A keep-out point; the shared radius d_min lives on the Scenario.
struct RestrictedZone {
  Eigen::Vector2d position{0.0, 0.0};
};

// Immutable description of one delivery world. Building and zone order is
// significant: assignment indices and delivered-masks refer to it.
struct Scenario {
  std::string name;
  std::vector<Building> buildings;       // index j
  std::vector<RestrictedZone> zones;     // index k
  double d_min = 0.0;
  std::vector<Eigen::Vector2d> drone_starts;  // index i
  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d B = Eigen::Matrix2d::Identity();
  int horizon = 1;     // N
  double lambda = 0.0; // default weight for both the fleet and control penalties
};

bool operator==(const Scenario& a, const Scenario& b);

// The two built-in experiment worlds, "env1" and "env2".
// Throws ValidationError for unknown ids, naming the valid ones.
Scenario builtin_scenario(std::string_view id);
const std::vector<std::string>& builtin_scenario_ids();

// Scenario file format: a UTF-8 JSON object with keys name, d_min, lambda,
// horizon, A, B (2x2 row-major arrays), drone_starts ([[x,y],...]),
// buildings ([{x,y,kind,cost},...]) and zones ([[x,y],...]).
// Unknown keys are rejected. load_scenario also rejects scenarios that fail
// validate(). Round-trips through save_scenario are field-exact.
Scenario load_scenario(const std::string& text);
std::string save_scenario(const Scenario& scenario);

// Returns one human-readable description per violated invariant (empty when
// the scenario is well-formed). Pure; never throws on bad data.
std::vector<std::string> validate(const Scenario& scenario);

}  // namespace dronefleet

#include "dronefleet/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

#include "dronefleet/errors.hpp"

namespace dronefleet {

using nlohmann::json;

std::string_view to_string(BuildingKind kind) {
  switch (kind) {
    case BuildingKind::home: return "home";
    case BuildingKind::office: return "office";
    case BuildingKind::shop: return "shop";
    case BuildingKind::custom: return "custom";
  }
  return "custom";
}

BuildingKind building_kind_from_string(std::string_view text) {
  if (text == "home") return BuildingKind::home;
  if (text == "office") return BuildingKind::office;
  if (text == "shop") return BuildingKind::shop;
  if (text == "custom") return BuildingKind::custom;
  throw ParseError("unknown building kind '" + std::string(text) +
                   "' (expected home, office, shop or custom)");
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.name != b.name || a.d_min != b.d_min || a.lambda != b.lambda ||
      a.horizon != b.horizon || a.A != b.A || a.B != b.B) {
    return false;
  }
  if (a.buildings.size() != b.buildings.size() || a.zones.size() != b.zones.size() ||
      a.drone_starts.size() != b.drone_starts.size()) {
    return false;
  }
  for (std::size_t j = 0; j < a.buildings.size(); ++j) {
    if (a.buildings[j].position != b.buildings[j].position ||
        a.buildings[j].kind != b.buildings[j].kind ||
        a.buildings[j].cost != b.buildings[j].cost) {
      return false;
    }
  }
  for (std::size_t k = 0; k < a.zones.size(); ++k) {
    if (a.zones[k].position != b.zones[k].position) return false;
  }
  for (std::size_t i = 0; i < a.drone_starts.size(); ++i) {
    if (a.drone_starts[i] != b.drone_starts[i]) return false;
  }
  return true;
}

namespace {

void append_buildings(Scenario& s, BuildingKind kind, double cost,
                      std::initializer_list<std::pair<double, double>> positions) {
  for (const auto& [x, y] : positions) {
    s.buildings.push_back({Eigen::Vector2d(x, y), kind, cost});
  }
}

void append_zones(Scenario& s, std::initializer_list<std::pair<double, double>> positions) {
  for (const auto& [x, y] : positions) {
    s.zones.push_back({Eigen::Vector2d(x, y)});
  }
}

Scenario make_env1() {
  Scenario s;
  s.name = "env1";
  append_buildings(s, BuildingKind::home, 1.0,
                   {{2, 3}, {5, 7}, {9, 2}, {12, 5}, {15, 8}});
  append_buildings(s, BuildingKind::office, 2.0,
                   {{8, 6}, {3, 8}, {10, 10}, {14, 3}});
  append_buildings(s, BuildingKind::shop, 1.5,
                   {{4, 5}, {7, 4}, {11, 7}, {13, 6}});
  append_zones(s, {{3, 4}, {6, 6}, {1, 2}, {7, 3}, {10, 5}, {12, 9}});
  s.d_min = 1.0;
  s.drone_starts = {{0, 0}, {1, 1}, {2, 2}};
  s.horizon = 20;
  s.lambda = 30.0;
  return s;
}

Scenario make_env2() {
  Scenario s;
  s.name = "env2";
  append_buildings(s, BuildingKind::home, 1.0,
                   {{2, 3}, {5, 7}, {9, 2}, {12, 5}, {15, 8}, {18, 10}, {20, 4}, {22, 7}, {25, 9}});
  append_buildings(s, BuildingKind::office, 2.0,
                   {{8, 6}, {3, 8}, {10, 10}, {14, 3}, {17, 5}, {19, 8}, {21, 2}, {24, 6}});
  append_buildings(s, BuildingKind::shop, 1.5,
                   {{4, 5}, {7, 4}, {11, 7}, {13, 6}, {16, 9}, {20, 3}, {23, 5}, {26, 8}});
  append_zones(s, {{3, 4}, {6, 6}, {1, 2}, {7, 3}, {10, 5}, {12, 9}, {15, 2}, {18, 7}, {20, 5},
                   {22, 3}, {24, 8}, {26, 4}, {28, 6}, {30, 3}, {32, 7}, {34, 5}, {36, 9}});
  s.d_min = 1.0;
  s.drone_starts = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  s.horizon = 30;
  s.lambda = 10.0;
  return s;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_ids() {
  static const std::vector<std::string> ids = {"env1", "env2"};
  return ids;
}

Scenario builtin_scenario(std::string_view id) {
  if (id == "env1") return make_env1();
  if (id == "env2") return make_env2();
  std::ostringstream msg;
  msg << "unknown scenario id '" << id << "' (valid ids:";
  for (const auto& known : builtin_scenario_ids()) msg << " " << known;
  msg << ")";
  throw ValidationError(msg.str());
}

namespace {

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> known,
                         const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    (void)value;
    bool ok = false;
    for (auto k : known) {
      if (key == k) { ok = true; break; }
    }
    if (!ok) throw ParseError("unknown key '" + key + "' in " + where);
  }
}

double require_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

Eigen::Vector2d require_vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw ParseError(where + ": expected an [x, y] pair");
  }
  return {require_number(j[0], where + "[0]"), require_number(j[1], where + "[1]")};
}

Eigen::Matrix2d require_mat2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw ParseError(where + ": expected a 2x2 row-major array");
  }
  Eigen::Matrix2d m;
  for (int r = 0; r < 2; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != 2) {
      throw ParseError(where + ": expected a 2x2 row-major array");
    }
    for (int c = 0; c < 2; ++c) {
      m(r, c) = require_number(row[c], where);
    }
  }
  return m;
}

}  // namespace

Scenario load_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario file must be a JSON object");

  reject_unknown_keys(doc,
                      {"name", "d_min", "lambda", "horizon", "A", "B", "drone_starts",
                       "buildings", "zones"},
                      "scenario");
  for (auto key : {"name", "d_min", "lambda", "horizon", "A", "B", "drone_starts",
                   "buildings", "zones"}) {
    if (!doc.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  }

  Scenario s;
  if (!doc["name"].is_string()) throw ParseError("name: expected a string");
  s.name = doc["name"].get<std::string>();
  s.d_min = require_number(doc["d_min"], "d_min");
  s.lambda = require_number(doc["lambda"], "lambda");
  if (!doc["horizon"].is_number_integer()) throw ParseError("horizon: expected an integer");
  s.horizon = doc["horizon"].get<int>();
  s.A = require_mat2(doc["A"], "A");
  s.B = require_mat2(doc["B"], "B");

  if (!doc["drone_starts"].is_array()) throw ParseError("drone_starts: expected an array");
  for (std::size_t i = 0; i < doc["drone_starts"].size(); ++i) {
    s.drone_starts.push_back(
        require_vec2(doc["drone_starts"][i], "drone_starts[" + std::to_string(i) + "]"));
  }

  if (!doc["buildings"].is_array()) throw ParseError("buildings: expected an array");
  for (std::size_t j = 0; j < doc["buildings"].size(); ++j) {
    const json& b = doc["buildings"][j];
    const std::string where = "buildings[" + std::to_string(j) + "]";
    if (!b.is_object()) throw ParseError(where + ": expected an object");
    reject_unknown_keys(b, {"x", "y", "kind", "cost"}, where);
    for (auto key : {"x", "y", "kind", "cost"}) {
      if (!b.contains(key)) throw ParseError(where + ": missing key '" + key + "'");
    }
    Building building;
    building.position = {require_number(b["x"], where + ".x"),
                         require_number(b["y"], where + ".y")};
    if (!b["kind"].is_string()) throw ParseError(where + ".kind: expected a string");
    building.kind = building_kind_from_string(b["kind"].get<std::string>());
    building.cost = require_number(b["cost"], where + ".cost");
    s.buildings.push_back(building);
  }

  if (!doc["zones"].is_array()) throw ParseError("zones: expected an array");
  for (std::size_t k = 0; k < doc["zones"].size(); ++k) {
    s.zones.push_back({require_vec2(doc["zones"][k], "zones[" + std::to_string(k) + "]")});
  }

  auto violations = validate(s);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "scenario failed validation:";
    for (const auto& v : violations) msg << "\n  - " << v;
    throw ValidationError(msg.str());
  }
  return s;
}

std::string save_scenario(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["d_min"] = s.d_min;
  doc["lambda"] = s.lambda;
  doc["horizon"] = s.horizon;
  doc["A"] = {{s.A(0, 0), s.A(0, 1)}, {s.A(1, 0), s.A(1, 1)}};
  doc["B"] = {{s.B(0, 0), s.B(0, 1)}, {s.B(1, 0), s.B(1, 1)}};
  doc["drone_starts"] = json::array();
  for (const auto& start : s.drone_starts) {
    doc["drone_starts"].push_back({start.x(), start.y()});
  }
  doc["buildings"] = json::array();
  for (const auto& b : s.buildings) {
    doc["buildings"].push_back({{"x", b.position.x()},
                                {"y", b.position.y()},
                                {"kind", std::string(to_string(b.kind))},
                                {"cost", b.cost}});
  }
  doc["zones"] = json::array();
  for (const auto& z : s.zones) {
    doc["zones"].push_back({z.position.x(), z.position.y()});
  }
  return doc.dump(2) + "\n";
}

namespace {

bool finite(const Eigen::Vector2d& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y());
}

}  // namespace

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> out;
  auto add = [&out](const std::string& v) { out.push_back(v); };

  if (s.buildings.empty()) add("buildings: at least one building required (M >= 1)");
  if (s.drone_starts.empty()) add("drone_starts: at least one drone required (n >= 1)");
  if (s.horizon < 1) add("horizon: must be >= 1 (got " + std::to_string(s.horizon) + ")");
  if (!std::isfinite(s.d_min) || s.d_min < 0.0) add("d_min: must be finite and >= 0");
  if (!std::isfinite(s.lambda) || s.lambda < 0.0) add("lambda: must be finite and >= 0");
  if (!s.A.allFinite()) add("A: entries must be finite");
  if (!s.B.allFinite()) add("B: entries must be finite");

  for (std::size_t j = 0; j < s.buildings.size(); ++j) {
    const auto& b = s.buildings[j];
    if (!finite(b.position)) {
      add("buildings[" + std::to_string(j) + "].position: must be finite");
    }
    if (!std::isfinite(b.cost) || b.cost < 0.0) {
      add("buildings[" + std::to_string(j) + "].cost: must be finite and >= 0 (got " +
          std::to_string(b.cost) + ")");
    }
  }
  for (std::size_t k = 0; k < s.zones.size(); ++k) {
    if (!finite(s.zones[k].position)) {
      add("zones[" + std::to_string(k) + "].position: must be finite");
    }
  }
  for (std::size_t i = 0; i < s.drone_starts.size(); ++i) {
    if (!finite(s.drone_starts[i])) {
      add("drone_starts[" + std::to_string(i) + "]: must be finite");
      continue;
    }
    for (std::size_t k = 0; k < s.zones.size(); ++k) {
      if (!finite(s.zones[k].position)) continue;
      const double dist = (s.drone_starts[i] - s.zones[k].position).norm();
      if (dist < s.d_min) {
        std::ostringstream msg;
        msg << "drone_starts[" << i << "]: distance " << dist << " to zones[" << k
            << "] is below d_min=" << s.d_min;
        add(msg.str());
      }
    }
  }
  return out;
}

}  // namespace dronefleet

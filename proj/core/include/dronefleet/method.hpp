#pragma once

#include <string_view>

namespace dronefleet {

enum class Method { mpc, iql, jal, vdn };

std::string_view to_string(Method method);
Method method_from_string(std::string_view text);

inline constexpr bool is_marl(Method method) { return method != Method::mpc; }

}  // namespace dronefleet

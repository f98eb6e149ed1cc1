#include "dronefleet/trajectory.hpp"

namespace dronefleet {

Eigen::Vector2d step_dynamics(const Eigen::Matrix2d& A, const Eigen::Matrix2d& B,
                              const Eigen::Vector2d& x, const Eigen::Vector2d& u) {
  return A.transpose() * x + B.transpose() * u;
}

DroneTrajectory rollout(const Eigen::Matrix2d& A, const Eigen::Matrix2d& B,
                        const Eigen::Vector2d& x0,
                        std::span<const Eigen::Vector2d> controls) {
  DroneTrajectory trajectory;
  trajectory.states.reserve(controls.size() + 1);
  trajectory.controls.assign(controls.begin(), controls.end());
  trajectory.states.push_back(x0);
  for (const auto& u : controls) {
    trajectory.states.push_back(step_dynamics(A, B, trajectory.states.back(), u));
  }
  return trajectory;
}

}  // namespace dronefleet

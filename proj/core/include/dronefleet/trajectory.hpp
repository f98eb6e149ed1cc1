#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace dronefleet {

// One drone's planned motion: states x(0..N) and controls u(0..N-1).
// A trajectory produced by rollout() satisfies
//   states[t+1] = A^T * states[t] + B^T * controls[t]
// for every t.
struct DroneTrajectory {
  std::vector<Eigen::Vector2d> states;
  std::vector<Eigen::Vector2d> controls;

  int horizon() const { return static_cast<int>(controls.size()); }
  const Eigen::Vector2d& final_state() const { return states.back(); }
};

// x(k+1) = A^T x(k) + B^T u(k). The transpose convention is deliberate and
// observable with asymmetric matrices.
Eigen::Vector2d step_dynamics(const Eigen::Matrix2d& A, const Eigen::Matrix2d& B,
                              const Eigen::Vector2d& x, const Eigen::Vector2d& u);

DroneTrajectory rollout(const Eigen::Matrix2d& A, const Eigen::Matrix2d& B,
                        const Eigen::Vector2d& x0,
                        std::span<const Eigen::Vector2d> controls);

}  // namespace dronefleet

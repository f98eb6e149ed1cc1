#include "dronefleet/optimizer.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

#include "dronefleet/errors.hpp"

namespace dronefleet {

namespace {

// Uniform in [-1, 1), reproducible independent of the standard library's
// distribution implementations.
double symmetric_uniform(std::mt19937_64& rng) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

Eigen::Matrix2d pseudo_inverse(const Eigen::Matrix2d& m) {
  return m.completeOrthogonalDecomposition().pseudoInverse();
}

void check_config(const OptimizerConfig& config) {
  if (!(config.learning_rate >= 0.0 && config.learning_rate <= 1.0)) {
    throw ValidationError("optimizer config: learning_rate must lie in [0, 1]");
  }
  if (config.max_iterations < 1) {
    throw ValidationError("optimizer config: max_iterations must be >= 1");
  }
  if (!(config.convergence_epsilon >= 0.0)) {
    throw ValidationError("optimizer config: convergence_epsilon must be >= 0");
  }
  if (config.lambda_ctrl && !(*config.lambda_ctrl >= 0.0)) {
    throw ValidationError("optimizer config: lambda_ctrl must be >= 0");
  }
  if (!(config.init_noise >= 0.0)) {
    throw ValidationError("optimizer config: init_noise must be >= 0");
  }
}

}  // namespace

OptimizationResult optimize(const Scenario& scenario, const OptimizerConfig& config) {
  check_config(config);
  if (auto violations = validate(scenario); !violations.empty()) {
    std::ostringstream msg;
    msg << "optimize: scenario failed validation:";
    for (const auto& v : violations) msg << "\n  - " << v;
    throw ValidationError(msg.str());
  }

  const double lambda_ctrl = config.lambda_ctrl.value_or(scenario.lambda);
  const double alpha = config.learning_rate;
  const int n_drones = static_cast<int>(scenario.drone_starts.size());
  const int horizon = scenario.horizon;
  const Eigen::Matrix2d a_t = scenario.A.transpose();
  const Eigen::Matrix2d b_t_pinv = pseudo_inverse(scenario.B.transpose());

  // Zero controls plus seeded symmetric noise.
  std::mt19937_64 rng(config.seed);
  std::vector<std::vector<Eigen::Vector2d>> controls(n_drones);
  for (auto& u : controls) {
    u.resize(horizon);
    for (auto& step : u) {
      step.x() = config.init_noise * symmetric_uniform(rng);
      step.y() = config.init_noise * symmetric_uniform(rng);
    }
  }

  OptimizationResult result;
  result.trajectories.reserve(n_drones);
  for (int i = 0; i < n_drones; ++i) {
    result.trajectories.push_back(
        rollout(scenario.A, scenario.B, scenario.drone_starts[i], controls[i]));
  }

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    const CostBreakdown cost = total_cost(scenario, result.trajectories, lambda_ctrl);
    if (!std::isfinite(cost.total)) {
      const double last = result.cost_history.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : result.cost_history.back().total;
      std::ostringstream msg;
      msg << "optimize: non-finite cost at iteration " << iteration
          << " (last finite total " << last << "); reduce the learning rate";
      throw DivergenceError(iteration, last, msg.str());
    }
    result.cost_history.push_back(cost);
    result.iterations_used = iteration;

    if (cost.total == 0.0) {
      result.converged = true;
      break;
    }
    if (result.cost_history.size() >= 2) {
      const double previous = result.cost_history[result.cost_history.size() - 2].total;
      if (std::abs(cost.total - previous) < config.convergence_epsilon) {
        result.converged = true;
        break;
      }
    }
    if (iteration == config.max_iterations) break;

    const CostGradients grads = grad_total_cost(scenario, result.trajectories, lambda_ctrl);
    result.diagnostics.coincidence_events += grads.coincidences.size();

    for (int i = 0; i < n_drones; ++i) {
      const auto& gx = grads.state_grads[i];
      const auto& gu = grads.control_grads[i];
      for (int t = 0; t < horizon; ++t) {
        const Eigen::Vector2d state_step = gx[t + 1] - a_t * gx[t];
        controls[i][t] -= alpha * (gu[t] + b_t_pinv * state_step);
      }
      result.trajectories[i] =
          rollout(scenario.A, scenario.B, scenario.drone_starts[i], controls[i]);
    }
  }

  result.final_cost = result.cost_history.back();

  for (int i = 0; i < n_drones; ++i) {
    const auto& states = result.trajectories[i].states;
    for (std::size_t t = 1; t < states.size(); ++t) {
      for (std::size_t k = 0; k < scenario.zones.size(); ++k) {
        const double distance = (states[t] - scenario.zones[k].position).norm();
        if (distance < scenario.d_min) {
          result.diagnostics.final_zone_violations.push_back(
              {i, static_cast<int>(t), static_cast<int>(k), distance});
        }
      }
    }
  }
  return result;
}

}  // namespace dronefleet

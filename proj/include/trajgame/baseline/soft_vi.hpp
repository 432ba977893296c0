#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "trajgame/core/dynamics.hpp"
#include "trajgame/core/reward.hpp"
#include "trajgame/rollout/rollout.hpp"

namespace trajgame {

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int bins = 0;

  double step() const { return (hi - lo) / (bins - 1); }
  double value(int idx) const { return lo + idx * step(); }
  int snap(double x) const;
};

// Per-dimension state and action discretization for both agents. Joint
// grids are limited to at most 2 state dimensions per agent.
struct GridSpec {
  std::vector<GridAxis> state_i, state_j;
  std::vector<GridAxis> action_i, action_j;

  void validate() const;
  const std::vector<GridAxis>& state(AgentId k) const {
    return k == AgentId::I ? state_i : state_j;
  }
  const std::vector<GridAxis>& action(AgentId k) const {
    return k == AgentId::I ? action_i : action_j;
  }
};

// Product grid over up to 2 axes, row-major indexing.
class AxisGrid {
 public:
  AxisGrid() = default;
  explicit AxisGrid(std::vector<GridAxis> axes);

  int count() const { return count_; }
  int dims() const { return static_cast<int>(axes_.size()); }
  VectorXd value(int idx) const;
  void value_into(int idx, VectorXd& out) const;
  int snap(const VectorXd& x) const;
  double cell_volume() const;

 private:
  std::vector<GridAxis> axes_;
  int count_ = 0;
};

// Per-stage action distributions over the joint discrete state space. The
// joint state index is s_i * (number of agent-j states) + s_j.
struct TabularPolicy {
  AgentId owner = AgentId::I;
  std::shared_ptr<const GridSpec> grid;
  std::vector<MatrixXd> probs;  // [t-1](joint_state, own_action), rows sum to 1

  int horizon() const { return static_cast<int>(probs.size()); }
};

// Alternating per-agent finite-horizon backward DP under the soft-Bellman
// operator, the other agent's current tabular policy held fixed, until the
// max total-variation policy change over both agents falls below sweep_tol.
// Next-state lookup snaps to the nearest grid point.
std::pair<TabularPolicy, TabularPolicy> soft_vi_solve(const RewardModel& reward_i,
                                                      const RewardModel& reward_j,
                                                      const DynamicsModel& dynamics,
                                                      const GridSpec& grid, int T,
                                                      double sweep_tol = 1e-6,
                                                      int max_sweeps = 50);

// Samples discrete actions per stage (bin-center values), advances the true
// dynamics, snaps states for policy lookup only. With argmax = true the
// most probable action is taken, ties broken by the lowest action index.
RolloutBatch tabular_rollout(const TabularPolicy& policy_i, const TabularPolicy& policy_j,
                             const DynamicsModel& dynamics, const JointState& x0, int n,
                             uint64_t seed, bool argmax = false);

// Mean and variance of one agent's tabular stage-action distribution at a
// joint state, for comparisons against Gaussian stage policies.
void tabular_action_moments(const TabularPolicy& policy, int t, int joint_state, VectorXd& mean,
                            MatrixXd& covariance);

}  // namespace trajgame

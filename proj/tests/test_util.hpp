#pragma once

#include <memory>
#include <vector>

#include "trajgame/core/dynamics.hpp"
#include "trajgame/core/reward.hpp"
#include "trajgame/core/types.hpp"
#include "trajgame/rollout/rng.hpp"

namespace trajgame::testing {

// Deterministic pseudo-random trajectory: actions hashed from a seed, states
// rolled out through the dynamics (so the result is always feasible).
inline JointTrajectory random_trajectory(const DynamicsModel& dyn, const JointState& x0, int T,
                                         uint64_t seed, double action_scale = 1.0) {
  std::vector<VectorXd> ui(T), uj(T);
  for (int t = 0; t < T; ++t) {
    ui[t].resize(dyn.action_dim(AgentId::I));
    uj[t].resize(dyn.action_dim(AgentId::J));
    for (int d = 0; d < ui[t].size(); ++d)
      ui[t][d] = action_scale * rng::standard_normal(seed, 0, t, d);
    for (int d = 0; d < uj[t].size(); ++d)
      uj[t][d] = action_scale * rng::standard_normal(seed, 1, t, d);
  }
  return dyn.rollout(x0, ui, uj);
}

// The group-goal reward for one owner with fixed weights:
// -a1(|x_i|^2 + |x_j|^2) - a2(|u_i|^2 + |u_j|^2) - a3 |u_i + u_j|^2.
inline RewardModel group_goal_reward(AgentId owner, double a1, double a2, double a3, int dims) {
  RewardModel r;
  r.owner = owner;
  const VectorXd zero = VectorXd::Zero(dims);
  r.terms = {
      std::make_shared<QuadraticGoalTerm>(AgentId::I, Coefficient::fixed(a1), zero),
      std::make_shared<QuadraticGoalTerm>(AgentId::J, Coefficient::fixed(a1), zero),
      std::make_shared<QuadraticVelocityTerm>(AgentId::I, Coefficient::fixed(a2), zero),
      std::make_shared<QuadraticVelocityTerm>(AgentId::J, Coefficient::fixed(a2), zero),
      std::make_shared<CoupledActionTerm>(Coefficient::fixed(a3)),
  };
  return r;
}

// Reward touching only the owner's own blocks (single-agent structure).
inline RewardModel own_quadratic_reward(AgentId owner, double q, double ru, const VectorXd& goal) {
  RewardModel r;
  r.owner = owner;
  r.terms = {
      std::make_shared<QuadraticGoalTerm>(owner, Coefficient::fixed(q), goal),
      std::make_shared<QuadraticVelocityTerm>(owner, Coefficient::fixed(ru),
                                              VectorXd::Zero(goal.size())),
  };
  return r;
}

}  // namespace trajgame::testing

#pragma once

#include <vector>

#include "trajgame/core/dynamics.hpp"
#include "trajgame/core/reward.hpp"
#include "trajgame/solver/value_recursion.hpp"

namespace trajgame {

struct IterationConfig {
  double eta = 0.5;               // mean scaling of the deterministic roll-out, in (0, 1]
  int max_iterations = 100;
  double convergence_tol = 1e-6;  // max-norm trajectory change
  double regularization = 1e-6;   // -lambda*I damping seed on PD failure
  double divergence_bound = 1e6;  // throw when any state norm exceeds this

  void validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw SchemaError("eta must be in (0, 1]");
    if (max_iterations < 1) throw SchemaError("max_iterations must be >= 1");
    if (convergence_tol < 0.0) throw SchemaError("convergence_tol must be >= 0");
    if (regularization < 0.0) throw SchemaError("regularization must be >= 0");
  }
};

struct IterationRecord {
  int iteration = 0;
  double trajectory_delta = 0.0;
  double reward_i = 0.0;
  double reward_j = 0.0;
  double max_regularization = 0.0;  // largest lambda applied this iteration, 0 if none
};

struct IterativeResult {
  PolicySequence policy_i;
  PolicySequence policy_j;
  JointTrajectory reference;  // final reference the policies refer to
  std::vector<IterationRecord> log;
  int iterations = 0;
  bool converged = false;  // false = NonConvergent, a flagged success
};

// Alternates local approximation (taylor_expand, linearize, gs_cioc_backward)
// with a deterministic roll-out of the scaled means eta*mu until the
// trajectory change drops below convergence_tol or max_iterations is hit.
IterativeResult iterative_gs_cioc(const RewardModel& reward_i, const RewardModel& reward_j,
                                  const DynamicsModel& dynamics, const JointTrajectory& initial,
                                  const IterationConfig& cfg = {});

// T repetitions of x0 with zero actions; the usual initialization for the
// iterative solver.
JointTrajectory standstill_trajectory(const JointState& x0, int T, int action_dim_i,
                                      int action_dim_j);

}  // namespace trajgame

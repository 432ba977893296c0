#include "trajgame/solver/iterative.hpp"

#include <algorithm>
#include <cmath>

#include "trajgame/core/expansion.hpp"
#include "trajgame/rollout/rollout.hpp"

namespace trajgame {

JointTrajectory standstill_trajectory(const JointState& x0, int T, int action_dim_i,
                                      int action_dim_j) {
  JointTrajectory traj;
  traj.states.assign(T + 1, x0);
  traj.actions_i.assign(T, VectorXd::Zero(action_dim_i));
  traj.actions_j.assign(T, VectorXd::Zero(action_dim_j));
  return traj;
}

namespace {

void check_feasible(const DynamicsModel& dyn, const JointTrajectory& traj) {
  traj.check_consistent();
  for (int t = 1; t <= traj.horizon(); ++t) {
    const JointState next = dyn.step_joint(traj.states[t - 1], traj.action(AgentId::I, t),
                                           traj.action(AgentId::J, t));
    const double resid = std::max((next.x_i - traj.states[t].x_i).cwiseAbs().maxCoeff(),
                                  (next.x_j - traj.states[t].x_j).cwiseAbs().maxCoeff());
    if (resid > 1e-9)
      throw SchemaError("initial trajectory is not dynamically feasible at stage t=" +
                        std::to_string(t));
  }
}

void check_bounded(const JointTrajectory& traj, double bound) {
  for (const auto& s : traj.states) {
    if (s.x_i.norm() > bound || s.x_j.norm() > bound || !s.all_finite())
      throw DivergentTrajectory("iterative roll-out diverged beyond the configured state bound");
  }
}

}  // namespace

IterativeResult iterative_gs_cioc(const RewardModel& reward_i, const RewardModel& reward_j,
                                  const DynamicsModel& dynamics, const JointTrajectory& initial,
                                  const IterationConfig& cfg) {
  cfg.validate();
  check_feasible(dynamics, initial);

  IterativeResult res;
  auto ref = std::make_shared<const JointTrajectory>(initial);
  BackwardOptions bw_opts{cfg.regularization};

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    QuadraticExpansion exp_i = taylor_expand(reward_i, ref);
    QuadraticExpansion exp_j = taylor_expand(reward_j, ref);
    LinearizedDynamics lin = linearize(dynamics, *ref);
    BackwardResult bw = gs_cioc_backward(exp_i, exp_j, lin, bw_opts);

    JointTrajectory next =
        rollout_mean(bw.policy_i, bw.policy_j, dynamics, ref->states[0], cfg.eta);
    check_bounded(next, cfg.divergence_bound);

    double max_lambda = 0.0;
    for (const auto& note : bw.notes)
      if (note.kind == StageNote::Kind::Regularized)
        max_lambda = std::max(max_lambda, note.value);

    const double delta = max_difference(next, *ref);
    res.log.push_back({iter, delta, reward_i.total(next), reward_j.total(next), max_lambda});
    res.iterations = iter;
    ref = std::make_shared<const JointTrajectory>(std::move(next));
    if (delta < cfg.convergence_tol) {
      res.converged = true;
      break;
    }
  }

  // Final policies around the final reference.
  QuadraticExpansion exp_i = taylor_expand(reward_i, ref);
  QuadraticExpansion exp_j = taylor_expand(reward_j, ref);
  LinearizedDynamics lin = linearize(dynamics, *ref);
  BackwardResult bw = gs_cioc_backward(exp_i, exp_j, lin, bw_opts);
  res.policy_i = std::move(bw.policy_i);
  res.policy_j = std::move(bw.policy_j);
  res.reference = *ref;
  return res;
}

}  // namespace trajgame

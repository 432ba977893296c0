#include "trajgame/core/dynamics.hpp"

#include <cmath>

namespace trajgame {

JointTrajectory DynamicsModel::rollout(const JointState& x0,
                                       const std::vector<VectorXd>& actions_i,
                                       const std::vector<VectorXd>& actions_j) const {
  if (actions_i.size() != actions_j.size())
    throw DimensionMismatch("action sequences differ in length");
  JointTrajectory traj;
  traj.states.push_back(x0);
  traj.actions_i = actions_i;
  traj.actions_j = actions_j;
  for (size_t t = 0; t < actions_i.size(); ++t)
    traj.states.push_back(step_joint(traj.states.back(), actions_i[t], actions_j[t]));
  return traj;
}

namespace {

void fd_jacobians(const DynamicsModel& dyn, AgentId k, const VectorXd& x, const VectorXd& u,
                  MatrixXd& A, MatrixXd& B, int stage) {
  const int n = dyn.state_dim(k);
  const int m = dyn.action_dim(k);
  A.resize(n, n);
  B.resize(n, m);
  const double base_step = 1e-6;
  VectorXd xp = x, xm = x, up = u, um = u;
  for (int c = 0; c < n; ++c) {
    const double h = base_step * std::max(1.0, std::abs(x[c]));
    xp[c] = x[c] + h;
    xm[c] = x[c] - h;
    A.col(c) = (dyn.step(k, xp, u) - dyn.step(k, xm, u)) / (2.0 * h);
    xp[c] = x[c];
    xm[c] = x[c];
  }
  for (int c = 0; c < m; ++c) {
    const double h = base_step * std::max(1.0, std::abs(u[c]));
    up[c] = u[c] + h;
    um[c] = u[c] - h;
    B.col(c) = (dyn.step(k, x, up) - dyn.step(k, x, um)) / (2.0 * h);
    up[c] = u[c];
    um[c] = u[c];
  }
  if (!A.allFinite() || !B.allFinite())
    throw NonFiniteDerivative("dynamics jacobian is not finite", stage);
}

}  // namespace

LinearizedDynamics linearize(const DynamicsModel& dynamics, const JointTrajectory& reference) {
  reference.check_consistent();
  if (reference.states[0].x_i.size() != dynamics.state_dim(AgentId::I) ||
      reference.states[0].x_j.size() != dynamics.state_dim(AgentId::J))
    throw DimensionMismatch("reference state dimensions do not match dynamics");
  const int T = reference.horizon();
  LinearizedDynamics lin;
  lin.A_i.resize(T);
  lin.B_i.resize(T);
  lin.A_j.resize(T);
  lin.B_j.resize(T);
  for (int t = 1; t <= T; ++t) {
    for (AgentId k : {AgentId::I, AgentId::J}) {
      MatrixXd A, B;
      const VectorXd& x_prev = reference.states[t - 1].of(k);
      const VectorXd& u = reference.action(k, t);
      if (dynamics.has_analytic_jacobians())
        dynamics.jacobians(k, x_prev, u, A, B);
      else
        fd_jacobians(dynamics, k, x_prev, u, A, B, t);
      if (!A.allFinite() || !B.allFinite())
        throw NonFiniteDerivative("dynamics jacobian is not finite", t);
      auto& As = (k == AgentId::I) ? lin.A_i : lin.A_j;
      auto& Bs = (k == AgentId::I) ? lin.B_i : lin.B_j;
      As[t - 1] = std::move(A);
      Bs[t - 1] = std::move(B);
    }
  }
  return lin;
}

}  // namespace trajgame

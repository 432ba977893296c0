#pragma once

#include "trajgame/core/types.hpp"

namespace trajgame {

// Deterministic per-agent step map x_{kt} = f_k(x_{k,t-1}, u_{kt}).
// Agent sub-states are decoupled: f_k sees only agent k's sub-state and action.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual int state_dim(AgentId k) const = 0;
  virtual int action_dim(AgentId k) const = 0;
  virtual VectorXd step(AgentId k, const VectorXd& x, const VectorXd& u) const = 0;

  // Override when closed-form Jacobians are available; otherwise linearize()
  // falls back to central finite differences.
  virtual bool has_analytic_jacobians() const { return false; }
  virtual void jacobians(AgentId /*k*/, const VectorXd& /*x*/, const VectorXd& /*u*/,
                         MatrixXd& /*A*/, MatrixXd& /*B*/) const {
    throw Error("analytic jacobians not implemented");
  }

  JointState step_joint(const JointState& x, const VectorXd& u_i, const VectorXd& u_j) const {
    return JointState(step(AgentId::I, x.x_i, u_i), step(AgentId::J, x.x_j, u_j));
  }

  // Roll the dynamics forward from x0 under the given action sequences.
  JointTrajectory rollout(const JointState& x0, const std::vector<VectorXd>& actions_i,
                          const std::vector<VectorXd>& actions_j) const;
};

// x_t = x_{t-1} + u_t
class IntegratorDynamics final : public DynamicsModel {
 public:
  IntegratorDynamics(int state_dim_i, int state_dim_j)
      : n_i_(state_dim_i), n_j_(state_dim_j) {}

  int state_dim(AgentId k) const override { return k == AgentId::I ? n_i_ : n_j_; }
  int action_dim(AgentId k) const override { return state_dim(k); }
  VectorXd step(AgentId, const VectorXd& x, const VectorXd& u) const override { return x + u; }

  bool has_analytic_jacobians() const override { return true; }
  void jacobians(AgentId k, const VectorXd&, const VectorXd&, MatrixXd& A,
                 MatrixXd& B) const override {
    A = MatrixXd::Identity(state_dim(k), state_dim(k));
    B = MatrixXd::Identity(state_dim(k), state_dim(k));
  }

 private:
  int n_i_;
  int n_j_;
};

// Per-stage Jacobians of the deviation dynamics xbar_kt = A_kt xbar_{k,t-1} + B_kt ubar_kt.
struct LinearizedDynamics {
  std::vector<MatrixXd> A_i, B_i;   // index t-1 for stage t in 1..T
  std::vector<MatrixXd> A_j, B_j;

  int horizon() const { return static_cast<int>(A_i.size()); }
  const MatrixXd& A(AgentId k, int t) const { return (k == AgentId::I ? A_i : A_j)[t - 1]; }
  const MatrixXd& B(AgentId k, int t) const { return (k == AgentId::I ? B_i : B_j)[t - 1]; }
};

// A_kt = d x_kt / d x_{k,t-1}, B_kt = d x_kt / d u_kt evaluated at the
// reference; exact for linear dynamics.
LinearizedDynamics linearize(const DynamicsModel& dynamics, const JointTrajectory& reference);

}  // namespace trajgame

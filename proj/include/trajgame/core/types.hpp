#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajgame {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Exactly two agents per game instance.
enum class AgentId { I = 0, J = 1 };

inline AgentId other(AgentId k) { return k == AgentId::I ? AgentId::J : AgentId::I; }
inline const char* agent_name(AgentId k) { return k == AgentId::I ? "i" : "j"; }
inline int agent_index(AgentId k) { return static_cast<int>(k); }

// ---------------------------------------------------------------------------
// Errors. The CLI maps SchemaError and its kin to exit code 2 and
// NumericalError subclasses to exit code 3.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class NegativeParameter : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class MissingCoefficient : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonFiniteDerivative : public NumericalError {
 public:
  NonFiniteDerivative(const std::string& what, int stage)
      : NumericalError(what + " (stage t=" + std::to_string(stage) + ")"), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

class SingularMeanSystem : public NumericalError {
 public:
  explicit SingularMeanSystem(int stage)
      : NumericalError("coupled mean system is singular (stage t=" + std::to_string(stage) + ")"),
        stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

class NonPositiveDefinitePrecision : public NumericalError {
 public:
  NonPositiveDefinitePrecision(int stage, AgentId agent)
      : NumericalError(std::string("policy precision -M(") + agent_name(agent) +
                       ") is not positive definite (stage t=" + std::to_string(stage) +
                       "); local reward approximation is not concave in the action"),
        stage_(stage),
        agent_(agent) {}
  int stage() const { return stage_; }
  AgentId agent() const { return agent_; }

 private:
  int stage_;
  AgentId agent_;
};

class DivergentTrajectory : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientSamples : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GridTooCoarse : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteObjective : public NumericalError {
 public:
  NonFiniteObjective(int iteration)
      : NumericalError("objective became non-finite at iteration " + std::to_string(iteration)) {}
};

// ---------------------------------------------------------------------------
// Joint state and trajectory
// ---------------------------------------------------------------------------

// Joint state split into the agent-specific sub-states each agent controls.
struct JointState {
  VectorXd x_i;
  VectorXd x_j;

  JointState() = default;
  JointState(VectorXd xi, VectorXd xj) : x_i(std::move(xi)), x_j(std::move(xj)) {}

  const VectorXd& of(AgentId k) const { return k == AgentId::I ? x_i : x_j; }
  VectorXd& of(AgentId k) { return k == AgentId::I ? x_i : x_j; }

  bool all_finite() const { return x_i.allFinite() && x_j.allFinite(); }
};

// States x_0..x_T plus per-agent action sequences u_1..u_T. Actions are
// indexed by the stage they lead to: actions_i[t-1] is u_{it}, the action
// taking agent i from x_{t-1} to x_t.
struct JointTrajectory {
  std::vector<JointState> states;        // length T+1
  std::vector<VectorXd> actions_i;       // length T
  std::vector<VectorXd> actions_j;       // length T

  int horizon() const { return static_cast<int>(actions_i.size()); }

  const std::vector<VectorXd>& actions(AgentId k) const {
    return k == AgentId::I ? actions_i : actions_j;
  }
  std::vector<VectorXd>& actions(AgentId k) { return k == AgentId::I ? actions_i : actions_j; }

  // u_{kt} for t in 1..T
  const VectorXd& action(AgentId k, int t) const { return actions(k)[t - 1]; }
  const JointState& state(int t) const { return states[t]; }

  void check_consistent() const;
  bool same_shape_as(const JointTrajectory& o) const;
};

bool approx_equal(const JointTrajectory& a, const JointTrajectory& b, double tol);

// Max-norm distance over all states and actions; shapes must match.
double max_difference(const JointTrajectory& a, const JointTrajectory& b);

// ---------------------------------------------------------------------------
// Deviation coordinates: xbar = x - x*, ubar = u - u*
// ---------------------------------------------------------------------------

struct DeviationSequences {
  std::vector<JointState> states;    // length T+1
  std::vector<VectorXd> actions_i;   // length T
  std::vector<VectorXd> actions_j;   // length T
};

DeviationSequences to_deviation(const JointTrajectory& traj, const JointTrajectory& reference);
JointTrajectory from_deviation(const DeviationSequences& dev, const JointTrajectory& reference);

}  // namespace trajgame

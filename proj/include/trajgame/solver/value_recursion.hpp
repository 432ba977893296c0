#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "trajgame/core/dynamics.hpp"
#include "trajgame/core/expansion.hpp"
#include "trajgame/core/types.hpp"

namespace trajgame {

// Quadratic/linear coefficients of one agent's value function in deviation
// coordinates at one timestep:
//   V(xb_i, xb_j) = .5 xb_i' V_ii xb_i + .5 xb_j' V_jj xb_j + xb_j' V_ji xb_i
//                   + xb_i' v_i + xb_j' v_j  (+ state-independent constant)
struct QuadraticValue {
  MatrixXd V_ii, V_jj, V_ji;
  VectorXd v_i, v_j;

  static QuadraticValue zero(int n_i, int n_j);
};

// Affine-mean Gaussian policy of one agent at one stage, in deviation
// coordinates: mean = nu + Pi * xb_other + Omega * xb_own, where "other" is
// the opposite agent's previous-stage state deviation and "own" the agent's
// own. precision is -M_kk (positive definite), covariance its inverse.
struct StagePolicy {
  VectorXd nu;
  MatrixXd Pi;
  MatrixXd Omega;
  MatrixXd precision;
  MatrixXd covariance;

  VectorXd mean(const VectorXd& xbar_other, const VectorXd& xbar_own) const {
    return nu + Pi * xbar_other + Omega * xbar_own;
  }
};

struct PolicySequence {
  AgentId owner = AgentId::I;
  std::vector<StagePolicy> stages;  // index t-1 for stage t in 1..T
  std::shared_ptr<const JointTrajectory> reference;

  int horizon() const { return static_cast<int>(stages.size()); }
  const StagePolicy& at(int t) const { return stages[t - 1]; }
};

// Signed stage precision blocks M_(nm)t = B_n' Qhat_(nm) B_m + Htilde_(nm)
// of one agent's reward assembly (the paper's sign convention; the Gaussian
// policy precision is -M_(kk)).
struct PrecisionBlocks {
  MatrixXd m_ii, m_ij, m_ji, m_jj;
};

std::pair<PrecisionBlocks, PrecisionBlocks> compute_precisions(
    const QuadraticExpansion& expansion_i, const QuadraticExpansion& expansion_j,
    const LinearizedDynamics& lin, const QuadraticValue& value_i, const QuadraticValue& value_j,
    int t);

// Affine coefficients of both agents' stage means.
struct StageMeans {
  VectorXd nu_i;
  MatrixXd Pi_i;     // response of agent i to xb_j
  MatrixXd Omega_i;  // response of agent i to xb_i
  VectorXd nu_j;
  MatrixXd Pi_j;     // response of agent j to xb_i
  MatrixXd Omega_j;  // response of agent j to xb_j
};

struct StageNote {
  enum class Kind { IllConditioned, Regularized };
  Kind kind;
  int t = 0;
  AgentId agent = AgentId::I;
  double value = 0.0;  // condition estimate or applied lambda
};

// Solves the coupled linear system for both agents' mean-action coefficients
// (three right-hand sides: constant, coefficient of xb_i, coefficient of
// xb_j). Throws SingularMeanSystem when the system is numerically singular;
// appends an IllConditioned note above condition 1e8.
StageMeans solve_stage_means(const PrecisionBlocks& prec_i, const PrecisionBlocks& prec_j,
                             const QuadraticExpansion& expansion_i,
                             const QuadraticExpansion& expansion_j, const LinearizedDynamics& lin,
                             const QuadraticValue& value_i, const QuadraticValue& value_j, int t,
                             std::vector<StageNote>* notes = nullptr);

// One backward step of the owner's value recursion: V at t-1 from V at t,
// the owner's expansion/precisions and the other agent's stage policy
// coefficients. General mixed state-action form; reduces to the plain
// recursion when the expansion has no mixed blocks.
QuadraticValue value_step(AgentId owner, const PrecisionBlocks& prec_owner,
                          const StageMeans& means, const QuadraticExpansion& expansion_owner,
                          const LinearizedDynamics& lin, const QuadraticValue& value_owner, int t);

struct BackwardOptions {
  // 0 disables recovery: a non-PD policy precision throws. When positive,
  // -lambda*I is added to the offending own-action Hessian block, lambda
  // doubling from this seed until -M_kk is positive definite; each
  // application is recorded as a Regularized note.
  double regularization = 0.0;
};

struct BackwardResult {
  PolicySequence policy_i;
  PolicySequence policy_j;
  std::vector<StageNote> notes;
};

// Backward pass over t = T..1: stage precisions, coupled means, then (for
// t > 1) the value recursion for both agents. Returns both policy sequences
// around the shared reference.
BackwardResult gs_cioc_backward(const QuadraticExpansion& expansion_i,
                                const QuadraticExpansion& expansion_j,
                                const LinearizedDynamics& lin, const BackwardOptions& opts = {});

// Joint-agent baseline: both agents fused into one with the stacked action
// (u_i; u_j), a shared cooperative reward and block-diagonal dynamics.
struct JointStagePolicy {
  VectorXd nu;
  MatrixXd K_i;  // response to xb_i
  MatrixXd K_j;  // response to xb_j
  MatrixXd precision;   // over the stacked action
  MatrixXd covariance;

  VectorXd mean(const VectorXd& xbar_i, const VectorXd& xbar_j) const {
    return nu + K_i * xbar_i + K_j * xbar_j;
  }
};

struct JointPolicySequence {
  std::vector<JointStagePolicy> stages;
  std::shared_ptr<const JointTrajectory> reference;
  int action_dim_i = 0;  // leading block of the stacked action

  int horizon() const { return static_cast<int>(stages.size()); }
  const JointStagePolicy& at(int t) const { return stages[t - 1]; }
};

JointPolicySequence m_cioc_backward(const QuadraticExpansion& joint_expansion,
                                    const LinearizedDynamics& lin,
                                    const BackwardOptions& opts = {});

// Single-agent recursion for the expansion's owner: the other agent is a
// non-reacting dynamic obstacle following its reference path (its blocks in
// the expansion are ignored). Pi of the returned policies is zero.
PolicySequence single_agent_cioc_backward(const QuadraticExpansion& expansion,
                                          const LinearizedDynamics& lin,
                                          const BackwardOptions& opts = {});

// Policy of one stage rewritten in absolute coordinates
//   u(x_other, x_own) = constant + gain_other * x_other + gain_own * x_own,
// which is reference-independent for exactly quadratic games.
struct AbsoluteStagePolicy {
  VectorXd constant;
  MatrixXd gain_other;
  MatrixXd gain_own;
  MatrixXd precision;
};

AbsoluteStagePolicy to_absolute(const PolicySequence& seq, int t);

}  // namespace trajgame

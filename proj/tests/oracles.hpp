#pragma once

#include <functional>
#include <vector>

#include "trajgame/core/reward.hpp"
#include "trajgame/core/types.hpp"

// Independent reference implementations used only by tests. These stay as
// close as possible to textbook definitions and never call into the solver
// code paths they check.
namespace trajgame::testing {

// Central finite differences of a full reward model at one point, with an
// explicit step so tests can sweep and Richardson-check.
StageQuadratic fd_reward_quadratic(const RewardModel& reward, const VectorXd& x_i,
                                   const VectorXd& x_j, const VectorXd& u_i, const VectorXd& u_j,
                                   double step);

// Finite-horizon discrete-time Riccati recursion for the regulator
//   x_t = A x_{t-1} + B u_t,  stage cost x_t' Q x_t + u_t' R u_t (minimized),
// returning per-stage feedback gains K_t with u_t = -K_t x_{t-1},
// index t-1 for t in 1..T.
std::vector<MatrixXd> riccati_feedback_gains(const MatrixXd& A, const MatrixXd& B,
                                             const MatrixXd& Q, const MatrixXd& R, int T);

// Dense-grid soft-Bellman quadrature for 1D-per-agent two-agent games in
// deviation coordinates. Per stage, the simultaneous tabular policy fixed
// point is computed at probe states (each agent's Q integrates the other's
// current tabular policy), values fitted as quadratics in
// (xbar_i, xbar_j) and fed backward.
struct StageFit {
  // value function at the stage's entry, V(xbar_{t-1})
  double V_ii = 0, V_jj = 0, V_ji = 0, v_i = 0, v_j = 0;
  // stage policy of the agent: mean = nu + pi * xbar_other + omega * xbar_own
  double nu = 0, pi = 0, omega = 0;
  double precision = 0;  // 1 / Var at zero deviation
  double value_fit_residual = 0;
  double mean_fit_residual = 0;
};

struct QuadratureOracleResult {
  std::vector<StageFit> agent_i, agent_j;  // index t-1 for stage t
};

using StageRewardFn = std::function<double(int t, double xi, double xj, double ui, double uj)>;

QuadratureOracleResult soft_bellman_quadrature_1d(const StageRewardFn& reward_i,
                                                  const StageRewardFn& reward_j,
                                                  const std::vector<double>& A_i,
                                                  const std::vector<double>& B_i,
                                                  const std::vector<double>& A_j,
                                                  const std::vector<double>& B_j, int T,
                                                  double u_range = 12.0, int u_points = 601,
                                                  double probe_range = 0.5, int probe_points = 5);

// Soft (maximum-entropy) LQR for a scalar single agent, solved in closed
// form: returns per-stage (nu, gain, variance) for reward
// -q x_t^2 - r u_t^2 + gx x_t with dynamics x_t = a x_{t-1} + b u_t.
struct ScalarSoftLqrStage {
  double nu = 0, gain = 0, variance = 0;
};
std::vector<ScalarSoftLqrStage> scalar_soft_lqr(double a, double b, double q, double r,
                                                double gx, int T);

}  // namespace trajgame::testing

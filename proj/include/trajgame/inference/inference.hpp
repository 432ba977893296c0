#pragma once

#include <memory>
#include <vector>

#include "trajgame/core/dynamics.hpp"
#include "trajgame/core/reward.hpp"
#include "trajgame/core/types.hpp"

namespace trajgame {

// Which local policy approximation the likelihood is built on. The
// single-agent variants treat the other agent as a non-reacting dynamic
// obstacle and score only the named agent's actions.
enum class LikelihoodBackend { GsCioc, SingleAgentI, SingleAgentJ };

// Observed trajectories bound to the scenario structure whose theta is free.
struct Demonstration {
  std::vector<JointTrajectory> trajectories;
  std::shared_ptr<const DynamicsModel> dynamics;
  RewardModel reward_i;
  RewardModel reward_j;

  void validate() const;
};

// Average over trajectories of the summed per-stage Gaussian log-densities
// of the observed actions under local policies computed around each
// trajectory as its own reference.
double log_likelihood(const VectorXd& theta, const Demonstration& demo,
                      LikelihoodBackend backend = LikelihoodBackend::GsCioc, int threads = 0);

// Central finite differences over theta with relative step fd_step.
VectorXd grad_log_likelihood(const VectorXd& theta, const Demonstration& demo,
                             double fd_step = 1e-5,
                             LikelihoodBackend backend = LikelihoodBackend::GsCioc,
                             int threads = 0);

struct InferenceConfig {
  VectorXd theta0;
  double learning_rate = 1e-3;
  int max_iterations = 50000;
  double grad_tol = 1e-6;        // max-norm gradient stop
  double fd_step = 1e-5;
  bool project_nonnegative = true;
  int threads = 0;               // 0 = hardware concurrency
  LikelihoodBackend backend = LikelihoodBackend::GsCioc;
  // |objective change| below this for stagnation_window consecutive accepted
  // steps counts as convergence.
  double stagnation_tol = 1e-9;
  int stagnation_window = 10;
  int max_halvings = 20;

  void validate() const;
};

struct TracePoint {
  int iteration = 0;
  double objective = 0.0;
  VectorXd theta;
  double step_scale = 1.0;  // fraction of the learning rate after backtracking
};

struct InferenceResult {
  VectorXd theta;
  double objective = 0.0;
  std::vector<TracePoint> trace;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient ascent with backtracking halving on objective decrease.
InferenceResult infer(const Demonstration& demo, const InferenceConfig& cfg);

}  // namespace trajgame

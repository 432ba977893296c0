#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trajgame/core/dynamics.hpp"
#include "trajgame/core/types.hpp"
#include "trajgame/solver/value_recursion.hpp"

namespace trajgame {

enum class PolicyProvenance { GsCioc, MCioc, Iterative, Tabular };

const char* provenance_name(PolicyProvenance p);

struct RolloutBatch {
  std::vector<JointTrajectory> trajectories;  // shared horizon and x0
  uint64_t seed = 0;
  PolicyProvenance provenance = PolicyProvenance::GsCioc;

  int size() const { return static_cast<int>(trajectories.size()); }
  int horizon() const { return trajectories.empty() ? 0 : trajectories[0].horizon(); }
};

// Per-agent Gaussian sampling: at each stage each agent draws its action
// independently around reference action + stage mean. Deterministic
// dynamics advance the state. Reproducible bit-for-bit for a given seed.
RolloutBatch sample_rollouts(const PolicySequence& policy_i, const PolicySequence& policy_j,
                             const DynamicsModel& dynamics, const JointState& x0, int n,
                             uint64_t seed);

// Joint sampling from the stacked Gaussian of the fused agent.
RolloutBatch sample_rollouts(const JointPolicySequence& policy, const DynamicsModel& dynamics,
                             const JointState& x0, int n, uint64_t seed);

// Deterministic roll-out following the policy means scaled by mean_scale
// (covariance treated as zero).
JointTrajectory rollout_mean(const PolicySequence& policy_i, const PolicySequence& policy_j,
                             const DynamicsModel& dynamics, const JointState& x0,
                             double mean_scale = 1.0);
JointTrajectory rollout_mean(const JointPolicySequence& policy, const DynamicsModel& dynamics,
                             const JointState& x0, double mean_scale = 1.0);

struct BatchStatistics {
  int n = 0;
  JointTrajectory mean_trajectory;
  std::vector<VectorXd> std_states_i, std_states_j;    // index t, t = 0..T
  std::vector<VectorXd> std_actions_i, std_actions_j;  // index t-1, t = 1..T
  // Pearson coefficient over pooled pairs (du_i, du_j) matched by timestep
  // and action dimension; undefined (nullopt) when either agent shows no
  // variance or the action dimensions differ.
  std::optional<double> correlation;
  std::vector<double> per_timestep_correlation;  // index t-1, NaN where undefined
  double total_action_variance = 0.0;            // pooled over agents, stages, dimensions
};

// reference_mean, when given, replaces the batch mean as the center the
// deviations are measured from.
BatchStatistics batch_statistics(const RolloutBatch& batch,
                                 const JointTrajectory* reference_mean = nullptr);

double variance_ratio(const BatchStatistics& a, const BatchStatistics& b);

}  // namespace trajgame

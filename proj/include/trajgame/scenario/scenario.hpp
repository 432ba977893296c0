#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trajgame/core/dynamics.hpp"
#include "trajgame/core/reward.hpp"
#include "trajgame/core/types.hpp"

namespace trajgame {

// Declarative scenario: dynamics, per-agent reward term descriptors with
// theta slots, initial state, horizon and roll-out defaults. Serializes to
// the versioned JSON schema
//   {"schema_version": 1, "name": ..., "agents": [{"state_dim", "action_dim",
//    "reward_terms": [...]}, ...], "dynamics": {"type", "params"},
//    "x0": [[...], [...]], "T": ..., "theta": [...],
//    "defaults": {"n_rollouts", "seed"}}
struct ScenarioConfig {
  int schema_version = 1;
  std::string name;

  struct AgentSpec {
    int state_dim = 0;
    int action_dim = 0;
    std::vector<nlohmann::ordered_json> reward_terms;
  };
  AgentSpec agent_i, agent_j;

  std::string dynamics_type = "integrator";
  JointState x0;
  int T = 1;
  VectorXd theta;  // current / ground-truth parameter values
  int default_rollouts = 2000;
  uint64_t default_seed = 0;

  void validate() const;
};

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const nlohmann::ordered_json& j);
ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const ScenarioConfig& cfg, const std::string& path);

// Instantiated scenario: constructed dynamics and reward models.
struct BuiltScenario {
  std::shared_ptr<const DynamicsModel> dynamics;
  RewardModel reward_i;
  RewardModel reward_j;
  JointState x0;
  int T = 0;
  VectorXd theta;
  int default_rollouts = 2000;
  uint64_t default_seed = 0;
};

BuiltScenario build_scenario(const ScenarioConfig& cfg);

// The two-agent group-goal game: 2D integrator agents starting at (20, 20)
// and (20, -20), rewards -a1(|x_i|^2 + |x_j|^2) - a2(|u_i|^2 + |u_j|^2)
// - a3|u_i + u_j|^2 per agent, T = 14. With alpha_i == alpha_j the reward is
// cooperative and both agents share the three theta slots; otherwise theta
// has six slots, agent i's triple first.
ScenarioConfig build_group_goal_scenario(const Eigen::Vector3d& alpha_i,
                                         const Eigen::Vector3d& alpha_j);

// Pedestrian-crossing game: 1D agents on crossing axes, positions relative
// to the path intersection. The pedestrian (agent i) starts at -6 walking
// toward +6; the car (agent j) starts at +6 driving toward -6. Both get
// quadratic goal and velocity-preference rewards; the car also gets the
// crossing interaction term. With social = true the pedestrian additionally
// receives the car's goal reward. Coefficients are mandatory; see
// zebra_default_coefficients() for calibrated defaults.
ScenarioConfig build_zebra_scenario(bool social, const std::map<std::string, double>& coefficients);

// Calibrated (not paper-sourced) coefficient set reproducing the qualitative
// yield-and-cross behavior under the iterative solver.
std::map<std::string, double> zebra_default_coefficients();

}  // namespace trajgame

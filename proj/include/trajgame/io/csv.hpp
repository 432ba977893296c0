#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trajgame/rollout/rollout.hpp"

namespace trajgame {

// Batch CSV: one row per (trajectory, timestep, agent) with columns
//   traj_id,t,agent,x0..x{K-1},u0..u{L-1}
// where K/L are the larger state/action dimension of the two agents;
// trailing cells an agent does not use stay empty, and action cells are
// empty at t = 0 (actions are indexed by the stage they lead to). Numbers
// are written with 17 significant digits so round-trips are exact.
void write_batch_csv(std::ostream& out, const RolloutBatch& batch);
void write_batch_csv(const std::string& path, const RolloutBatch& batch);

std::vector<JointTrajectory> read_batch_csv(std::istream& in, int state_dim_i, int state_dim_j,
                                            int action_dim_i, int action_dim_j);
std::vector<JointTrajectory> read_batch_csv(const std::string& path, int state_dim_i,
                                            int state_dim_j, int action_dim_i, int action_dim_j);

std::string format_double(double v);

}  // namespace trajgame

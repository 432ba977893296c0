#pragma once

#include <memory>
#include <vector>

#include "trajgame/core/reward.hpp"
#include "trajgame/core/types.hpp"

namespace trajgame {

// Per-stage gradients and Hessians of one agent's reward about a reference
// trajectory. All recursion quantities downstream live in the deviation
// coordinates xbar = x - x*, ubar = u - u*.
struct QuadraticExpansion {
  AgentId owner = AgentId::I;
  std::vector<StageQuadratic> stages;                 // index t-1 for stage t in 1..T
  std::shared_ptr<const JointTrajectory> reference;
  bool has_mixed_blocks = false;                      // any nonzero d2r/du dx block

  int horizon() const { return static_cast<int>(stages.size()); }
  const StageQuadratic& at(int t) const { return stages[t - 1]; }
};

// Second-order Taylor expansion of the owner's reward at every stage of the
// reference. Catalog terms contribute analytic derivatives; terms without
// them are differentiated by central finite differences with relative step
// 1e-5 * max(1, |coordinate|).
QuadraticExpansion taylor_expand(const RewardModel& reward,
                                 std::shared_ptr<const JointTrajectory> reference);
QuadraticExpansion taylor_expand(const RewardModel& reward, const JointTrajectory& reference);

}  // namespace trajgame

#include "trajgame/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace trajgame {

void JointTrajectory::check_consistent() const {
  if (states.empty()) throw DimensionMismatch("trajectory has no states");
  const int T = horizon();
  if (static_cast<int>(states.size()) != T + 1)
    throw DimensionMismatch("trajectory must have T+1 states for T actions");
  if (static_cast<int>(actions_j.size()) != T)
    throw DimensionMismatch("per-agent action sequences must have equal length");
  const auto ni = states[0].x_i.size();
  const auto nj = states[0].x_j.size();
  for (const auto& s : states) {
    if (s.x_i.size() != ni || s.x_j.size() != nj)
      throw DimensionMismatch("state dimensions vary along trajectory");
    if (!s.all_finite()) throw DimensionMismatch("non-finite state in trajectory");
  }
  for (int t = 0; t < T; ++t) {
    if (!actions_i[t].allFinite() || !actions_j[t].allFinite())
      throw DimensionMismatch("non-finite action in trajectory");
  }
}

bool JointTrajectory::same_shape_as(const JointTrajectory& o) const {
  if (states.size() != o.states.size() || actions_i.size() != o.actions_i.size() ||
      actions_j.size() != o.actions_j.size())
    return false;
  if (states.empty()) return true;
  return states[0].x_i.size() == o.states[0].x_i.size() &&
         states[0].x_j.size() == o.states[0].x_j.size() &&
         (actions_i.empty() || actions_i[0].size() == o.actions_i[0].size()) &&
         (actions_j.empty() || actions_j[0].size() == o.actions_j[0].size());
}

double max_difference(const JointTrajectory& a, const JointTrajectory& b) {
  if (!a.same_shape_as(b)) throw DimensionMismatch("trajectories differ in shape");
  double d = 0.0;
  for (size_t t = 0; t < a.states.size(); ++t) {
    d = std::max(d, (a.states[t].x_i - b.states[t].x_i).cwiseAbs().maxCoeff());
    d = std::max(d, (a.states[t].x_j - b.states[t].x_j).cwiseAbs().maxCoeff());
  }
  for (size_t t = 0; t < a.actions_i.size(); ++t) {
    d = std::max(d, (a.actions_i[t] - b.actions_i[t]).cwiseAbs().maxCoeff());
    d = std::max(d, (a.actions_j[t] - b.actions_j[t]).cwiseAbs().maxCoeff());
  }
  return d;
}

bool approx_equal(const JointTrajectory& a, const JointTrajectory& b, double tol) {
  return a.same_shape_as(b) && max_difference(a, b) <= tol;
}

DeviationSequences to_deviation(const JointTrajectory& traj, const JointTrajectory& reference) {
  if (!traj.same_shape_as(reference))
    throw DimensionMismatch("trajectory and reference differ in horizon or dimensions");
  DeviationSequences dev;
  dev.states.reserve(traj.states.size());
  for (size_t t = 0; t < traj.states.size(); ++t)
    dev.states.emplace_back(traj.states[t].x_i - reference.states[t].x_i,
                            traj.states[t].x_j - reference.states[t].x_j);
  dev.actions_i.reserve(traj.actions_i.size());
  dev.actions_j.reserve(traj.actions_j.size());
  for (size_t t = 0; t < traj.actions_i.size(); ++t) {
    dev.actions_i.push_back(traj.actions_i[t] - reference.actions_i[t]);
    dev.actions_j.push_back(traj.actions_j[t] - reference.actions_j[t]);
  }
  return dev;
}

JointTrajectory from_deviation(const DeviationSequences& dev, const JointTrajectory& reference) {
  if (dev.states.size() != reference.states.size() ||
      dev.actions_i.size() != reference.actions_i.size())
    throw DimensionMismatch("deviation sequences and reference differ in horizon");
  JointTrajectory traj;
  traj.states.reserve(dev.states.size());
  for (size_t t = 0; t < dev.states.size(); ++t)
    traj.states.emplace_back(dev.states[t].x_i + reference.states[t].x_i,
                             dev.states[t].x_j + reference.states[t].x_j);
  for (size_t t = 0; t < dev.actions_i.size(); ++t) {
    traj.actions_i.push_back(dev.actions_i[t] + reference.actions_i[t]);
    traj.actions_j.push_back(dev.actions_j[t] + reference.actions_j[t]);
  }
  return traj;
}

}  // namespace trajgame

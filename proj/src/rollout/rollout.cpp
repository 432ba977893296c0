#include "trajgame/rollout/rollout.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "trajgame/rollout/rng.hpp"

namespace trajgame {

namespace rng {

double standard_normal(uint64_t seed, uint64_t stream, uint64_t step, uint64_t slot) {
  const double u1 = uniform(seed, stream, step, slot, 0);
  const double u2 = uniform(seed, stream, step, slot, 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace rng

const char* provenance_name(PolicyProvenance p) {
  switch (p) {
    case PolicyProvenance::GsCioc: return "gs-cioc";
    case PolicyProvenance::MCioc: return "m-cioc";
    case PolicyProvenance::Iterative: return "iterative";
    case PolicyProvenance::Tabular: return "tabular";
  }
  return "?";
}

namespace {

void check_compatible(const PolicySequence& pi, const PolicySequence& pj,
                      const JointState& x0) {
  if (pi.horizon() != pj.horizon()) throw DimensionMismatch("policy horizons differ");
  if (!pi.reference || !pj.reference) throw DimensionMismatch("policy lacks reference");
  if (pi.reference != pj.reference && !approx_equal(*pi.reference, *pj.reference, 0.0))
    throw DimensionMismatch("policies do not share a reference trajectory");
  const auto& ref0 = pi.reference->states[0];
  if (x0.x_i.size() != ref0.x_i.size() || x0.x_j.size() != ref0.x_j.size())
    throw DimensionMismatch("x0 dimensions incompatible with policy reference");
}

// Cholesky factors of the stage covariances, for sampling.
std::vector<MatrixXd> covariance_factors(const PolicySequence& p) {
  std::vector<MatrixXd> ls;
  ls.reserve(p.stages.size());
  for (const auto& st : p.stages) {
    Eigen::LLT<MatrixXd> llt(st.covariance);
    if (llt.info() != Eigen::Success)
      throw NumericalError("policy covariance is not positive definite");
    ls.push_back(llt.matrixL());
  }
  return ls;
}

JointTrajectory one_rollout(const PolicySequence& pol_i, const PolicySequence& pol_j,
                            const std::vector<MatrixXd>& L_i, const std::vector<MatrixXd>& L_j,
                            const DynamicsModel& dyn, const JointState& x0, uint64_t seed,
                            uint64_t stream) {
  const JointTrajectory& ref = *pol_i.reference;
  const int T = pol_i.horizon();
  const int m_i = static_cast<int>(ref.actions_i[0].size());
  const int m_j = static_cast<int>(ref.actions_j[0].size());

  JointTrajectory traj;
  traj.states.reserve(T + 1);
  traj.states.push_back(x0);
  traj.actions_i.reserve(T);
  traj.actions_j.reserve(T);
  VectorXd z_i(m_i), z_j(m_j);
  for (int t = 1; t <= T; ++t) {
    const VectorXd xb_i = traj.states.back().x_i - ref.states[t - 1].x_i;
    const VectorXd xb_j = traj.states.back().x_j - ref.states[t - 1].x_j;
    for (int d = 0; d < m_i; ++d)
      z_i[d] = rng::standard_normal(seed, stream, 2 * t, d);
    for (int d = 0; d < m_j; ++d)
      z_j[d] = rng::standard_normal(seed, stream, 2 * t + 1, d);
    const VectorXd u_i =
        ref.action(AgentId::I, t) + pol_i.at(t).mean(xb_j, xb_i) + L_i[t - 1] * z_i;
    const VectorXd u_j =
        ref.action(AgentId::J, t) + pol_j.at(t).mean(xb_i, xb_j) + L_j[t - 1] * z_j;
    traj.states.push_back(dyn.step_joint(traj.states.back(), u_i, u_j));
    traj.actions_i.push_back(u_i);
    traj.actions_j.push_back(u_j);
  }
  return traj;
}

}  // namespace

RolloutBatch sample_rollouts(const PolicySequence& policy_i, const PolicySequence& policy_j,
                             const DynamicsModel& dynamics, const JointState& x0, int n,
                             uint64_t seed) {
  if (n < 1) throw InsufficientSamples("rollout count must be >= 1");
  check_compatible(policy_i, policy_j, x0);
  const auto L_i = covariance_factors(policy_i);
  const auto L_j = covariance_factors(policy_j);

  RolloutBatch batch;
  batch.seed = seed;
  batch.provenance = PolicyProvenance::GsCioc;
  batch.trajectories.reserve(n);
  for (int k = 0; k < n; ++k)
    batch.trajectories.push_back(
        one_rollout(policy_i, policy_j, L_i, L_j, dynamics, x0, seed, k));
  return batch;
}

RolloutBatch sample_rollouts(const JointPolicySequence& policy, const DynamicsModel& dynamics,
                             const JointState& x0, int n, uint64_t seed) {
  if (n < 1) throw InsufficientSamples("rollout count must be >= 1");
  if (!policy.reference) throw DimensionMismatch("policy lacks reference");
  const JointTrajectory& ref = *policy.reference;
  const int T = policy.horizon();
  const int m_i = policy.action_dim_i;
  const int m = static_cast<int>(policy.stages[0].nu.size());

  std::vector<MatrixXd> Ls;
  Ls.reserve(T);
  for (const auto& st : policy.stages) {
    Eigen::LLT<MatrixXd> llt(st.covariance);
    if (llt.info() != Eigen::Success)
      throw NumericalError("policy covariance is not positive definite");
    Ls.push_back(llt.matrixL());
  }

  RolloutBatch batch;
  batch.seed = seed;
  batch.provenance = PolicyProvenance::MCioc;
  batch.trajectories.reserve(n);
  VectorXd z(m);
  for (int k = 0; k < n; ++k) {
    JointTrajectory traj;
    traj.states.push_back(x0);
    for (int t = 1; t <= T; ++t) {
      const VectorXd xb_i = traj.states.back().x_i - ref.states[t - 1].x_i;
      const VectorXd xb_j = traj.states.back().x_j - ref.states[t - 1].x_j;
      for (int d = 0; d < m; ++d) z[d] = rng::standard_normal(seed, k, t, d);
      VectorXd u = policy.at(t).mean(xb_i, xb_j) + Ls[t - 1] * z;
      u.head(m_i) += ref.action(AgentId::I, t);
      u.tail(m - m_i) += ref.action(AgentId::J, t);
      traj.states.push_back(dynamics.step_joint(traj.states.back(), u.head(m_i),
                                                u.tail(m - m_i)));
      traj.actions_i.push_back(u.head(m_i));
      traj.actions_j.push_back(u.tail(m - m_i));
    }
    batch.trajectories.push_back(std::move(traj));
  }
  return batch;
}

JointTrajectory rollout_mean(const PolicySequence& policy_i, const PolicySequence& policy_j,
                             const DynamicsModel& dynamics, const JointState& x0,
                             double mean_scale) {
  check_compatible(policy_i, policy_j, x0);
  const JointTrajectory& ref = *policy_i.reference;
  const int T = policy_i.horizon();
  JointTrajectory traj;
  traj.states.push_back(x0);
  for (int t = 1; t <= T; ++t) {
    const VectorXd xb_i = traj.states.back().x_i - ref.states[t - 1].x_i;
    const VectorXd xb_j = traj.states.back().x_j - ref.states[t - 1].x_j;
    const VectorXd u_i =
        ref.action(AgentId::I, t) + mean_scale * policy_i.at(t).mean(xb_j, xb_i);
    const VectorXd u_j =
        ref.action(AgentId::J, t) + mean_scale * policy_j.at(t).mean(xb_i, xb_j);
    traj.states.push_back(dynamics.step_joint(traj.states.back(), u_i, u_j));
    traj.actions_i.push_back(u_i);
    traj.actions_j.push_back(u_j);
  }
  return traj;
}

JointTrajectory rollout_mean(const JointPolicySequence& policy, const DynamicsModel& dynamics,
                             const JointState& x0, double mean_scale) {
  const JointTrajectory& ref = *policy.reference;
  const int T = policy.horizon();
  const int m_i = policy.action_dim_i;
  JointTrajectory traj;
  traj.states.push_back(x0);
  for (int t = 1; t <= T; ++t) {
    const VectorXd xb_i = traj.states.back().x_i - ref.states[t - 1].x_i;
    const VectorXd xb_j = traj.states.back().x_j - ref.states[t - 1].x_j;
    VectorXd u = mean_scale * policy.at(t).mean(xb_i, xb_j);
    const int m = static_cast<int>(u.size());
    u.head(m_i) += ref.action(AgentId::I, t);
    u.tail(m - m_i) += ref.action(AgentId::J, t);
    traj.states.push_back(
        dynamics.step_joint(traj.states.back(), u.head(m_i), u.tail(m - m_i)));
    traj.actions_i.push_back(u.head(m_i));
    traj.actions_j.push_back(u.tail(m - m_i));
  }
  return traj;
}

// ---------------------------------------------------------------------------

BatchStatistics batch_statistics(const RolloutBatch& batch,
                                 const JointTrajectory* reference_mean) {
  const int n = batch.size();
  if (n < 2) throw InsufficientSamples("need at least 2 trajectories for statistics");
  const int T = batch.horizon();
  for (const auto& tr : batch.trajectories) {
    if (tr.horizon() != T || !tr.same_shape_as(batch.trajectories[0]))
      throw DimensionMismatch("batch trajectories differ in shape");
  }

  BatchStatistics st;
  st.n = n;

  // mean trajectory
  JointTrajectory mean = batch.trajectories[0];
  for (int k = 1; k < n; ++k) {
    const auto& tr = batch.trajectories[k];
    for (int t = 0; t <= T; ++t) {
      mean.states[t].x_i += tr.states[t].x_i;
      mean.states[t].x_j += tr.states[t].x_j;
    }
    for (int t = 0; t < T; ++t) {
      mean.actions_i[t] += tr.actions_i[t];
      mean.actions_j[t] += tr.actions_j[t];
    }
  }
  for (int t = 0; t <= T; ++t) {
    mean.states[t].x_i /= n;
    mean.states[t].x_j /= n;
  }
  for (int t = 0; t < T; ++t) {
    mean.actions_i[t] /= n;
    mean.actions_j[t] /= n;
  }
  st.mean_trajectory = mean;

  const JointTrajectory& center = reference_mean ? *reference_mean : mean;
  if (!center.same_shape_as(mean))
    throw DimensionMismatch("reference mean differs in shape from batch");

  // per-timestep standard deviations (population, deviations from `center`)
  st.std_states_i.resize(T + 1);
  st.std_states_j.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    VectorXd acc_i = VectorXd::Zero(center.states[t].x_i.size());
    VectorXd acc_j = VectorXd::Zero(center.states[t].x_j.size());
    for (const auto& tr : batch.trajectories) {
      acc_i += (tr.states[t].x_i - center.states[t].x_i).array().square().matrix();
      acc_j += (tr.states[t].x_j - center.states[t].x_j).array().square().matrix();
    }
    st.std_states_i[t] = (acc_i / n).cwiseSqrt();
    st.std_states_j[t] = (acc_j / n).cwiseSqrt();
  }
  st.std_actions_i.resize(T);
  st.std_actions_j.resize(T);

  const int m_i = static_cast<int>(center.actions_i[0].size());
  const int m_j = static_cast<int>(center.actions_j[0].size());
  double sum_ii = 0.0, sum_jj = 0.0, sum_ij = 0.0;
  double total_var_acc = 0.0;
  long total_count = 0;
  st.per_timestep_correlation.assign(T, std::numeric_limits<double>::quiet_NaN());
  for (int t = 0; t < T; ++t) {
    VectorXd acc_i = VectorXd::Zero(m_i), acc_j = VectorXd::Zero(m_j);
    double s_ii = 0.0, s_jj = 0.0, s_ij = 0.0;
    for (const auto& tr : batch.trajectories) {
      const VectorXd d_i = tr.actions_i[t] - center.actions_i[t];
      const VectorXd d_j = tr.actions_j[t] - center.actions_j[t];
      acc_i += d_i.array().square().matrix();
      acc_j += d_j.array().square().matrix();
      if (m_i == m_j) {
        s_ii += d_i.squaredNorm();
        s_jj += d_j.squaredNorm();
        s_ij += d_i.dot(d_j);
      }
    }
    st.std_actions_i[t] = (acc_i / n).cwiseSqrt();
    st.std_actions_j[t] = (acc_j / n).cwiseSqrt();
    total_var_acc += acc_i.sum() + acc_j.sum();
    total_count += static_cast<long>(n) * (m_i + m_j);
    if (m_i == m_j && s_ii > 0.0 && s_jj > 0.0) {
      st.per_timestep_correlation[t] = s_ij / std::sqrt(s_ii * s_jj);
      sum_ii += s_ii;
      sum_jj += s_jj;
      sum_ij += s_ij;
    }
  }
  st.total_action_variance = total_var_acc / static_cast<double>(total_count);
  if (m_i == m_j && sum_ii > 0.0 && sum_jj > 0.0)
    st.correlation = sum_ij / std::sqrt(sum_ii * sum_jj);
  return st;
}

double variance_ratio(const BatchStatistics& a, const BatchStatistics& b) {
  if (b.total_action_variance <= 0.0)
    throw ZeroDenominator("denominator batch has zero action variance");
  return a.total_action_variance / b.total_action_variance;
}

}  // namespace trajgame

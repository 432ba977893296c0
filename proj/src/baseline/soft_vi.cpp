#include "trajgame/baseline/soft_vi.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "trajgame/rollout/rng.hpp"

namespace trajgame {

int GridAxis::snap(double x) const {
  const int idx = static_cast<int>(std::lround((x - lo) / step()));
  return std::clamp(idx, 0, bins - 1);
}

void GridSpec::validate() const {
  auto check_axes = [](const std::vector<GridAxis>& axes, const char* what) {
    if (axes.empty()) throw SchemaError(std::string(what) + ": no axes");
    for (const auto& a : axes) {
      if (a.bins < 2) throw SchemaError(std::string(what) + ": bins must be >= 2");
      if (!(a.hi > a.lo)) throw SchemaError(std::string(what) + ": hi must exceed lo");
    }
  };
  check_axes(state_i, "state_i");
  check_axes(state_j, "state_j");
  check_axes(action_i, "action_i");
  check_axes(action_j, "action_j");
  if (state_i.size() > 2 || state_j.size() > 2)
    throw GridTooCoarse(
        "tabular baseline supports at most 2 state dimensions per agent; the joint grid "
        "blows up combinatorially beyond that");
}

AxisGrid::AxisGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  count_ = 1;
  for (const auto& a : axes_) count_ *= a.bins;
}

VectorXd AxisGrid::value(int idx) const {
  VectorXd out(dims());
  value_into(idx, out);
  return out;
}

void AxisGrid::value_into(int idx, VectorXd& out) const {
  for (int d = dims() - 1; d >= 0; --d) {
    const int b = axes_[d].bins;
    out[d] = axes_[d].value(idx % b);
    idx /= b;
  }
}

int AxisGrid::snap(const VectorXd& x) const {
  int idx = 0;
  for (int d = 0; d < dims(); ++d) idx = idx * axes_[d].bins + axes_[d].snap(x[d]);
  return idx;
}

double AxisGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.step();
  return v;
}

namespace {

struct AgentTables {
  AxisGrid states;
  AxisGrid actions;
  std::vector<int> next;        // next[s * actions + a] = snapped next own-state index
  MatrixXd state_values;        // (S, n) coordinates
  MatrixXd action_values;      // (A, m)
};

AgentTables build_tables(AgentId k, const GridSpec& grid, const DynamicsModel& dyn) {
  AgentTables t;
  t.states = AxisGrid(grid.state(k));
  t.actions = AxisGrid(grid.action(k));
  if (t.states.dims() != dyn.state_dim(k) || t.actions.dims() != dyn.action_dim(k))
    throw DimensionMismatch("grid dimensions do not match dynamics");

  const int S = t.states.count(), A = t.actions.count();
  t.state_values.resize(S, t.states.dims());
  t.action_values.resize(A, t.actions.dims());
  VectorXd buf_s(t.states.dims()), buf_a(t.actions.dims());
  for (int s = 0; s < S; ++s) {
    t.states.value_into(s, buf_s);
    t.state_values.row(s) = buf_s;
  }
  for (int a = 0; a < A; ++a) {
    t.actions.value_into(a, buf_a);
    t.action_values.row(a) = buf_a;
  }

  const auto& axes = grid.state(k);
  t.next.resize(static_cast<size_t>(S) * A);
  for (int s = 0; s < S; ++s) {
    const VectorXd x = t.state_values.row(s);
    for (int a = 0; a < A; ++a) {
      const VectorXd u = t.action_values.row(a);
      const VectorXd x_next = dyn.step(k, x, u);
      for (int d = 0; d < t.states.dims(); ++d) {
        if (std::abs(x_next[d] - x[d]) > (axes[d].hi - axes[d].lo))
          throw GridTooCoarse("dynamics step exceeds the state range on one axis");
      }
      t.next[static_cast<size_t>(s) * A + a] = t.states.snap(x_next);
    }
  }
  return t;
}

// One finite-horizon backward DP for `own` with the other agent's tabular
// policy fixed. Returns the max total-variation change of the own policy.
double agent_sweep(AgentId own, const RewardModel& reward, const AgentTables& ti,
                   const AgentTables& tj, TabularPolicy& pol_own,
                   const TabularPolicy& pol_other, int T, const VectorXd& theta) {
  const AgentTables& to = own == AgentId::I ? ti : tj;
  const AgentTables& tx = own == AgentId::I ? tj : ti;  // the other agent
  const int Si = ti.states.count(), Sj = tj.states.count();
  const int S = Si * Sj;
  const int A_own = to.actions.count();
  const int A_oth = tx.actions.count();
  const double log_cell = std::log(to.actions.cell_volume());

  VectorXd v_next = VectorXd::Zero(S);
  VectorXd v_curr(S);
  double max_change = 0.0;

  const int workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  for (int t = T; t >= 1; --t) {
    MatrixXd& pnew = pol_own.probs[t - 1];
    const MatrixXd& poth = pol_other.probs[t - 1];
    std::vector<double> change_per_worker(workers, 0.0);

    auto work = [&](int w) {
      VectorXd q(A_own);
      VectorXd x_i(ti.states.dims()), x_j(tj.states.dims());
      VectorXd u_i(ti.actions.dims()), u_j(tj.actions.dims());
      double local_change = 0.0;
      for (int s = w; s < S; s += workers) {
        const int s_i = s / Sj, s_j = s % Sj;
        const int s_own = own == AgentId::I ? s_i : s_j;
        const int s_oth = own == AgentId::I ? s_j : s_i;
        for (int a = 0; a < A_own; ++a) {
          const int next_own = to.next[static_cast<size_t>(s_own) * A_own + a];
          double acc = 0.0;
          for (int b = 0; b < A_oth; ++b) {
            const double p = poth(s, b);
            if (p <= 0.0) continue;
            const int next_oth = tx.next[static_cast<size_t>(s_oth) * A_oth + b];
            const int s_next = own == AgentId::I ? next_own * Sj + next_oth
                                                 : next_oth * Sj + next_own;
            if (own == AgentId::I) {
              x_i = ti.state_values.row(next_own);
              x_j = tj.state_values.row(next_oth);
              u_i = ti.action_values.row(a);
              u_j = tj.action_values.row(b);
            } else {
              x_i = ti.state_values.row(next_oth);
              x_j = tj.state_values.row(next_own);
              u_i = ti.action_values.row(b);
              u_j = tj.action_values.row(a);
            }
            const double r = reward.value(x_i, x_j, u_i, u_j);
            acc += p * (r + v_next[s_next]);
          }
          q[a] = acc;
        }
        // log-sum-exp with max subtraction
        const double m = q.maxCoeff();
        const VectorXd w_exp = (q.array() - m).exp();
        const double z = w_exp.sum();
        v_curr[s] = m + std::log(z) + log_cell;
        double tv = 0.0;
        for (int a = 0; a < A_own; ++a) {
          const double pa = w_exp[a] / z;
          tv += std::abs(pa - pnew(s, a));
          pnew(s, a) = pa;
        }
        local_change = std::max(local_change, 0.5 * tv);
      }
      change_per_worker[w] = local_change;
    };

    if (workers <= 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
      for (auto& th : pool) th.join();
    }
    for (double c : change_per_worker) max_change = std::max(max_change, c);
    std::swap(v_next, v_curr);
  }
  return max_change;
}

}  // namespace

std::pair<TabularPolicy, TabularPolicy> soft_vi_solve(const RewardModel& reward_i,
                                                      const RewardModel& reward_j,
                                                      const DynamicsModel& dynamics,
                                                      const GridSpec& grid, int T,
                                                      double sweep_tol, int max_sweeps) {
  grid.validate();
  if (T < 1) throw SchemaError("horizon must be >= 1");
  const AgentTables ti = build_tables(AgentId::I, grid, dynamics);
  const AgentTables tj = build_tables(AgentId::J, grid, dynamics);
  const int S = ti.states.count() * tj.states.count();

  auto shared_grid = std::make_shared<const GridSpec>(grid);
  TabularPolicy pi{AgentId::I, shared_grid, {}}, pj{AgentId::J, shared_grid, {}};
  pi.probs.assign(T, MatrixXd::Constant(S, ti.actions.count(), 1.0 / ti.actions.count()));
  pj.probs.assign(T, MatrixXd::Constant(S, tj.actions.count(), 1.0 / tj.actions.count()));

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    const double ci = agent_sweep(AgentId::I, reward_i, ti, tj, pi, pj, T, reward_i.theta);
    const double cj = agent_sweep(AgentId::J, reward_j, ti, tj, pj, pi, T, reward_j.theta);
    if (std::max(ci, cj) < sweep_tol) return {std::move(pi), std::move(pj)};
  }
  throw NoConvergence("tabular policies did not converge within max_sweeps");
}

RolloutBatch tabular_rollout(const TabularPolicy& policy_i, const TabularPolicy& policy_j,
                             const DynamicsModel& dynamics, const JointState& x0, int n,
                             uint64_t seed, bool argmax) {
  if (n < 1) throw InsufficientSamples("rollout count must be >= 1");
  if (policy_i.horizon() != policy_j.horizon())
    throw DimensionMismatch("tabular policies differ in horizon");
  const GridSpec& grid = *policy_i.grid;
  const AxisGrid grid_si(grid.state_i), grid_sj(grid.state_j);
  const AxisGrid grid_ai(grid.action_i), grid_aj(grid.action_j);
  const int Sj = grid_sj.count();
  const int T = policy_i.horizon();

  auto pick = [&](const MatrixXd& probs, int s, uint64_t stream, uint64_t step,
                  uint64_t slot) {
    if (argmax) {
      int best = 0;
      probs.row(s).maxCoeff(&best);  // Eigen returns the first maximal index
      return best;
    }
    const double u = rng::uniform(seed, stream, step, slot, 0);
    double cum = 0.0;
    const int A = static_cast<int>(probs.cols());
    for (int a = 0; a < A; ++a) {
      cum += probs(s, a);
      if (u <= cum) return a;
    }
    return A - 1;
  };

  RolloutBatch batch;
  batch.seed = seed;
  batch.provenance = PolicyProvenance::Tabular;
  batch.trajectories.reserve(n);
  for (int k = 0; k < n; ++k) {
    JointTrajectory traj;
    traj.states.push_back(x0);
    for (int t = 1; t <= T; ++t) {
      const JointState& x = traj.states.back();
      const int s = grid_si.snap(x.x_i) * Sj + grid_sj.snap(x.x_j);
      const int a_i = pick(policy_i.probs[t - 1], s, k, 2 * t, 0);
      const int a_j = pick(policy_j.probs[t - 1], s, k, 2 * t + 1, 0);
      const VectorXd u_i = grid_ai.value(a_i);
      const VectorXd u_j = grid_aj.value(a_j);
      traj.states.push_back(dynamics.step_joint(x, u_i, u_j));
      traj.actions_i.push_back(u_i);
      traj.actions_j.push_back(u_j);
    }
    batch.trajectories.push_back(std::move(traj));
  }
  return batch;
}

void tabular_action_moments(const TabularPolicy& policy, int t, int joint_state, VectorXd& mean,
                            MatrixXd& covariance) {
  const AxisGrid actions(policy.owner == AgentId::I ? policy.grid->action_i
                                                    : policy.grid->action_j);
  const int A = actions.count();
  const int m = actions.dims();
  mean = VectorXd::Zero(m);
  covariance = MatrixXd::Zero(m, m);
  const auto& row = policy.probs[t - 1].row(joint_state);
  VectorXd u(m);
  for (int a = 0; a < A; ++a) {
    actions.value_into(a, u);
    mean += row[a] * u;
  }
  for (int a = 0; a < A; ++a) {
    actions.value_into(a, u);
    covariance += row[a] * (u - mean) * (u - mean).transpose();
  }
}

}  // namespace trajgame

#include "trajgame/core/expansion.hpp"

#include <cmath>

namespace trajgame {

namespace {

constexpr double kFdRel = 1e-5;

double fd_step(double coord) { return kFdRel * std::max(1.0, std::abs(coord)); }

// Central finite differences of a single term over the stacked coordinates
// (x_i, x_j, u_i, u_j). O(d^2) evaluations; used only for terms without
// analytic derivatives.
void fd_accumulate(const RewardTerm& term, const VectorXd& x_i, const VectorXd& x_j,
                   const VectorXd& u_i, const VectorXd& u_j, const VectorXd& theta,
                   StageQuadratic& out) {
  const int n_i = static_cast<int>(x_i.size());
  const int n_j = static_cast<int>(x_j.size());
  const int m_i = static_cast<int>(u_i.size());
  const int m_j = static_cast<int>(u_j.size());
  const int d = n_i + n_j + m_i + m_j;

  VectorXd z(d);
  z << x_i, x_j, u_i, u_j;
  auto eval = [&](const VectorXd& zz) {
    StagePoint p{zz.segment(0, n_i), zz.segment(n_i, n_j), zz.segment(n_i + n_j, m_i),
                 zz.segment(n_i + n_j + m_i, m_j), theta};
    return term.value(p);
  };

  const double f0 = eval(z);
  out.r += f0;

  VectorXd grad(d);
  MatrixXd hess(d, d);
  VectorXd za = z, zb = z;
  for (int a = 0; a < d; ++a) {
    const double ha = fd_step(z[a]);
    za[a] = z[a] + ha;
    const double fp = eval(za);
    za[a] = z[a] - ha;
    const double fm = eval(za);
    za[a] = z[a];
    grad[a] = (fp - fm) / (2.0 * ha);
    hess(a, a) = (fp - 2.0 * f0 + fm) / (ha * ha);
    for (int b = a + 1; b < d; ++b) {
      const double hb = fd_step(z[b]);
      za[a] = z[a] + ha;
      za[b] = z[b] + hb;
      const double fpp = eval(za);
      za[b] = z[b] - hb;
      const double fpm = eval(za);
      za[a] = z[a] - ha;
      const double fmm = eval(za);
      za[b] = z[b] + hb;
      const double fmp = eval(za);
      za[a] = z[a];
      za[b] = z[b];
      const double h = (fpp - fpm - fmp + fmm) / (4.0 * ha * hb);
      hess(a, b) = h;
      hess(b, a) = h;
    }
  }

  const int oxj = n_i, oui = n_i + n_j, ouj = n_i + n_j + m_i;
  out.gx_i += grad.segment(0, n_i);
  out.gx_j += grad.segment(oxj, n_j);
  out.gu_i += grad.segment(oui, m_i);
  out.gu_j += grad.segment(ouj, m_j);
  out.hx_ii += hess.block(0, 0, n_i, n_i);
  out.hx_jj += hess.block(oxj, oxj, n_j, n_j);
  out.hx_ji += hess.block(oxj, 0, n_j, n_i);
  out.hu_ii += hess.block(oui, oui, m_i, m_i);
  out.hu_jj += hess.block(ouj, ouj, m_j, m_j);
  out.hu_ji += hess.block(ouj, oui, m_j, m_i);
  out.hux_ii += hess.block(oui, 0, m_i, n_i);
  out.hux_ij += hess.block(oui, oxj, m_i, n_j);
  out.hux_ji += hess.block(ouj, 0, m_j, n_i);
  out.hux_jj += hess.block(ouj, oxj, m_j, n_j);
}

void symmetrize(MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace

QuadraticExpansion taylor_expand(const RewardModel& reward,
                                 std::shared_ptr<const JointTrajectory> reference) {
  reference->check_consistent();
  const int T = reference->horizon();
  const int n_i = static_cast<int>(reference->states[0].x_i.size());
  const int n_j = static_cast<int>(reference->states[0].x_j.size());
  const int m_i = T > 0 ? static_cast<int>(reference->actions_i[0].size()) : 0;
  const int m_j = T > 0 ? static_cast<int>(reference->actions_j[0].size()) : 0;

  QuadraticExpansion exp;
  exp.owner = reward.owner;
  exp.reference = reference;
  exp.stages.resize(T);

  for (int t = 1; t <= T; ++t) {
    StageQuadratic& sq = exp.stages[t - 1];
    sq.set_zero(n_i, n_j, m_i, m_j);
    const VectorXd& x_i = reference->states[t].x_i;
    const VectorXd& x_j = reference->states[t].x_j;
    const VectorXd& u_i = reference->action(AgentId::I, t);
    const VectorXd& u_j = reference->action(AgentId::J, t);
    StagePoint p{x_i, x_j, u_i, u_j, reward.theta};
    for (const auto& term : reward.terms) {
      if (term->analytic())
        term->accumulate(p, sq);
      else
        fd_accumulate(*term, x_i, x_j, u_i, u_j, reward.theta, sq);
    }
    symmetrize(sq.hx_ii);
    symmetrize(sq.hx_jj);
    symmetrize(sq.hu_ii);
    symmetrize(sq.hu_jj);
    if (!sq.all_finite())
      throw NonFiniteDerivative("reward or reward derivative is not finite at reference", t);
    if (sq.hux_ii.any() || sq.hux_ij.any() || sq.hux_ji.any() || sq.hux_jj.any())
      exp.has_mixed_blocks = true;
  }
  return exp;
}

QuadraticExpansion taylor_expand(const RewardModel& reward, const JointTrajectory& reference) {
  return taylor_expand(reward, std::make_shared<const JointTrajectory>(reference));
}

}  // namespace trajgame

#include "oracles.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace trajgame::testing {

StageQuadratic fd_reward_quadratic(const RewardModel& reward, const VectorXd& x_i,
                                   const VectorXd& x_j, const VectorXd& u_i, const VectorXd& u_j,
                                   double step) {
  const int n_i = static_cast<int>(x_i.size());
  const int n_j = static_cast<int>(x_j.size());
  const int m_i = static_cast<int>(u_i.size());
  const int m_j = static_cast<int>(u_j.size());
  const int d = n_i + n_j + m_i + m_j;

  VectorXd z(d);
  z << x_i, x_j, u_i, u_j;
  auto eval = [&](const VectorXd& zz) {
    return reward.value(zz.segment(0, n_i), zz.segment(n_i, n_j), zz.segment(n_i + n_j, m_i),
                        zz.segment(n_i + n_j + m_i, m_j));
  };

  const double f0 = eval(z);
  VectorXd grad(d);
  MatrixXd hess(d, d);
  VectorXd za = z;
  for (int a = 0; a < d; ++a) {
    za[a] = z[a] + step;
    const double fp = eval(za);
    za[a] = z[a] - step;
    const double fm = eval(za);
    za[a] = z[a];
    grad[a] = (fp - fm) / (2.0 * step);
    hess(a, a) = (fp - 2.0 * f0 + fm) / (step * step);
    for (int b = a + 1; b < d; ++b) {
      za[a] = z[a] + step;
      za[b] = z[b] + step;
      const double fpp = eval(za);
      za[b] = z[b] - step;
      const double fpm = eval(za);
      za[a] = z[a] - step;
      const double fmm = eval(za);
      za[b] = z[b] + step;
      const double fmp = eval(za);
      za[a] = z[a];
      za[b] = z[b];
      const double h = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
      hess(a, b) = h;
      hess(b, a) = h;
    }
  }

  StageQuadratic out;
  out.set_zero(n_i, n_j, m_i, m_j);
  out.r = f0;
  const int oxj = n_i, oui = n_i + n_j, ouj = n_i + n_j + m_i;
  out.gx_i = grad.segment(0, n_i);
  out.gx_j = grad.segment(oxj, n_j);
  out.gu_i = grad.segment(oui, m_i);
  out.gu_j = grad.segment(ouj, m_j);
  out.hx_ii = hess.block(0, 0, n_i, n_i);
  out.hx_jj = hess.block(oxj, oxj, n_j, n_j);
  out.hx_ji = hess.block(oxj, 0, n_j, n_i);
  out.hu_ii = hess.block(oui, oui, m_i, m_i);
  out.hu_jj = hess.block(ouj, ouj, m_j, m_j);
  out.hu_ji = hess.block(ouj, oui, m_j, m_i);
  out.hux_ii = hess.block(oui, 0, m_i, n_i);
  out.hux_ij = hess.block(oui, oxj, m_i, n_j);
  out.hux_ji = hess.block(ouj, 0, m_j, n_i);
  out.hux_jj = hess.block(ouj, oxj, m_j, n_j);
  return out;
}

std::vector<MatrixXd> riccati_feedback_gains(const MatrixXd& A, const MatrixXd& B,
                                             const MatrixXd& Q, const MatrixXd& R, int T) {
  // P_t holds the cost-to-go Hessian at the stage's exit; the stage cost is
  // charged on the next state, so P accumulates Q after the transition.
  std::vector<MatrixXd> gains(T);
  MatrixXd P = MatrixXd::Zero(A.rows(), A.cols());
  for (int t = T; t >= 1; --t) {
    const MatrixXd S = Q + P;  // cost on x_t plus cost-to-go from x_t
    const MatrixXd G = R + B.transpose() * S * B;
    const MatrixXd K = G.ldlt().solve(B.transpose() * S * A);
    gains[t - 1] = K;
    P = A.transpose() * S * A - A.transpose() * S * B * K;
  }
  return gains;
}

// ---------------------------------------------------------------------------

namespace {

struct ProbePolicies {
  // tabular action distributions of both agents at one probe state
  Eigen::VectorXd p_i, p_j;
};

}  // namespace

QuadratureOracleResult soft_bellman_quadrature_1d(
    const StageRewardFn& reward_i, const StageRewardFn& reward_j, const std::vector<double>& A_i,
    const std::vector<double>& B_i, const std::vector<double>& A_j,
    const std::vector<double>& B_j, int T, double u_range, int u_points, double probe_range,
    int probe_points) {
  const int U = u_points;
  Eigen::VectorXd ugrid(U);
  for (int k = 0; k < U; ++k) ugrid[k] = -u_range + 2.0 * u_range * k / (U - 1);
  const double du = ugrid[1] - ugrid[0];

  std::vector<double> probes(probe_points);
  for (int k = 0; k < probe_points; ++k)
    probes[k] = -probe_range + 2.0 * probe_range * k / (probe_points - 1);

  // value coefficients of both agents at the stage exit (zero at horizon)
  struct Quad {
    double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
    double eval(double zi, double zj) const {
      return 0.5 * a * zi * zi + 0.5 * b * zj * zj + c * zj * zi + d * zi + e * zj + f;
    }
  };
  Quad V_i, V_j;

  QuadratureOracleResult out;
  out.agent_i.resize(T);
  out.agent_j.resize(T);

  const int P = probe_points * probe_points;
  Eigen::MatrixXd design(P, 6);
  Eigen::VectorXd rhs_vi(P), rhs_vj(P);
  Eigen::MatrixXd mean_design(P, 3);
  Eigen::VectorXd rhs_mi(P), rhs_mj(P);

  for (int t = T; t >= 1; --t) {
    const double a_i = A_i[t - 1], b_i = B_i[t - 1];
    const double a_j = A_j[t - 1], b_j = B_j[t - 1];

    double nu_i = 0, prec_i = 0, nu_j = 0, prec_j = 0;
    int row = 0;
    for (double zi : probes) {
      for (double zj : probes) {
        // F_k(own action index, other action index) = r_k + V_k(next)
        Eigen::MatrixXd F_i(U, U), F_j(U, U);
        for (int ai = 0; ai < U; ++ai) {
          const double xi_next = a_i * zi + b_i * ugrid[ai];
          for (int aj = 0; aj < U; ++aj) {
            const double xj_next = a_j * zj + b_j * ugrid[aj];
            F_i(ai, aj) = reward_i(t, xi_next, xj_next, ugrid[ai], ugrid[aj]) +
                          V_i.eval(xi_next, xj_next);
            F_j(aj, ai) = reward_j(t, xi_next, xj_next, ugrid[ai], ugrid[aj]) +
                          V_j.eval(xi_next, xj_next);
          }
        }
        // simultaneous tabular fixed point
        Eigen::VectorXd p_i = Eigen::VectorXd::Constant(U, 1.0 / U);
        Eigen::VectorXd p_j = Eigen::VectorXd::Constant(U, 1.0 / U);
        Eigen::VectorXd q_i(U), q_j(U);
        for (int it = 0; it < 400; ++it) {
          q_i = F_i * p_j;
          Eigen::VectorXd pnew_i = (q_i.array() - q_i.maxCoeff()).exp();
          pnew_i /= pnew_i.sum();
          q_j = F_j * p_i;
          Eigen::VectorXd pnew_j = (q_j.array() - q_j.maxCoeff()).exp();
          pnew_j /= pnew_j.sum();
          const double delta = std::max((pnew_i - p_i).cwiseAbs().maxCoeff(),
                                        (pnew_j - p_j).cwiseAbs().maxCoeff());
          p_i = pnew_i;
          p_j = pnew_j;
          if (delta < 1e-14) break;
        }
        q_i = F_i * p_j;
        q_j = F_j * p_i;

        auto moments = [&](const Eigen::VectorXd& q, double& V, double& mean, double& var) {
          const double m = q.maxCoeff();
          Eigen::VectorXd w = (q.array() - m).exp();
          const double Z = w.sum() * du;
          V = m + std::log(Z);
          mean = (w.array() * ugrid.array()).sum() * du / Z;
          var = (w.array() * (ugrid.array() - mean).square()).sum() * du / Z;
        };
        double Vi_val, mi, vi_var, Vj_val, mj, vj_var;
        moments(q_i, Vi_val, mi, vi_var);
        moments(q_j, Vj_val, mj, vj_var);

        design.row(row) << 0.5 * zi * zi, 0.5 * zj * zj, zj * zi, zi, zj, 1.0;
        rhs_vi[row] = Vi_val;
        rhs_vj[row] = Vj_val;
        mean_design.row(row) << zi, zj, 1.0;
        rhs_mi[row] = mi;
        rhs_mj[row] = mj;
        if (zi == 0.0 && zj == 0.0) {
          nu_i = mi;
          prec_i = 1.0 / vi_var;
          nu_j = mj;
          prec_j = 1.0 / vj_var;
        }
        ++row;
      }
    }

    const Eigen::VectorXd ci = design.colPivHouseholderQr().solve(rhs_vi);
    const Eigen::VectorXd cj = design.colPivHouseholderQr().solve(rhs_vj);
    const Eigen::VectorXd mi_fit = mean_design.colPivHouseholderQr().solve(rhs_mi);
    const Eigen::VectorXd mj_fit = mean_design.colPivHouseholderQr().solve(rhs_mj);

    StageFit& fi = out.agent_i[t - 1];
    fi.V_ii = ci[0];
    fi.V_jj = ci[1];
    fi.V_ji = ci[2];
    fi.v_i = ci[3];
    fi.v_j = ci[4];
    fi.nu = nu_i;
    fi.omega = mi_fit[0];  // own state for agent i is xbar_i
    fi.pi = mi_fit[1];
    fi.precision = prec_i;
    fi.value_fit_residual = (design * ci - rhs_vi).cwiseAbs().maxCoeff();
    fi.mean_fit_residual = (mean_design * mi_fit - rhs_mi).cwiseAbs().maxCoeff();

    StageFit& fj = out.agent_j[t - 1];
    fj.V_ii = cj[0];
    fj.V_jj = cj[1];
    fj.V_ji = cj[2];
    fj.v_i = cj[3];
    fj.v_j = cj[4];
    fj.nu = nu_j;
    fj.pi = mj_fit[0];  // response of agent j to xbar_i
    fj.omega = mj_fit[1];
    fj.precision = prec_j;
    fj.value_fit_residual = (design * cj - rhs_vj).cwiseAbs().maxCoeff();
    fj.mean_fit_residual = (mean_design * mj_fit - rhs_mj).cwiseAbs().maxCoeff();

    V_i = Quad{ci[0], ci[1], ci[2], ci[3], ci[4], ci[5]};
    V_j = Quad{cj[0], cj[1], cj[2], cj[3], cj[4], cj[5]};
  }
  return out;
}

std::vector<ScalarSoftLqrStage> scalar_soft_lqr(double a, double b, double q, double r,
                                                double gx, int T) {
  // deviationless scalar recursion: Qhat = -2q + V, qhat = gx + v,
  // M = -2r + b^2 Qhat, mean = -(b qhat + b Qhat a x)/M, Var = -1/M
  std::vector<ScalarSoftLqrStage> stages(T);
  double V = 0.0, v = 0.0;
  for (int t = T; t >= 1; --t) {
    const double qhat_mat = -2.0 * q + V;
    const double qhat_vec = gx + v;
    const double M = -2.0 * r + b * b * qhat_mat;
    stages[t - 1].nu = -(b * qhat_vec) / M;
    stages[t - 1].gain = -(b * qhat_mat * a) / M;
    stages[t - 1].variance = -1.0 / M;
    const double Vn = a * qhat_mat * a - (a * qhat_mat * b) * (b * qhat_mat * a) / M;
    const double vn = a * qhat_vec - (a * qhat_mat * b) * (b * qhat_vec) / M;
    V = Vn;
    v = vn;
  }
  return stages;
}

}  // namespace trajgame::testing

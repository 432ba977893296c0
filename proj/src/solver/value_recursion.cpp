#include "trajgame/solver/value_recursion.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>

namespace trajgame {

QuadraticValue QuadraticValue::zero(int n_i, int n_j) {
  QuadraticValue v;
  v.V_ii = MatrixXd::Zero(n_i, n_i);
  v.V_jj = MatrixXd::Zero(n_j, n_j);
  v.V_ji = MatrixXd::Zero(n_j, n_i);
  v.v_i = VectorXd::Zero(n_i);
  v.v_j = VectorXd::Zero(n_j);
  return v;
}

namespace {

constexpr double kSingularRcond = 1e-12;
constexpr double kIllConditionedRcond = 1e-8;
constexpr double kSymmetryTol = 1e-9;

// Stage blocks of one agent's reward assembly: Qhat = Hhat + Vhat, folded
// action Hessians, precision blocks and Qdagger = H_ux + B' Qhat. Mixed
// state-action blocks are folded at full strength through the linearized
// dynamics.
struct StageAssembly {
  MatrixXd qx_ii, qx_jj, qx_ji, qx_ij;
  VectorXd q_i, q_j;
  MatrixXd ht_ii, ht_jj, ht_ji, ht_ij;
  MatrixXd m_ii, m_jj, m_ij, m_ji;
  MatrixXd qd_ii, qd_ij, qd_ji, qd_jj;
  VectorXd alpha_i, alpha_j;
  const StageQuadratic* sq = nullptr;
};

void assemble(const StageQuadratic& sq, const QuadraticValue& val, const MatrixXd& B_i,
              const MatrixXd& B_j, bool mixed, StageAssembly& a) {
  a.sq = &sq;
  a.qx_ii = sq.hx_ii + val.V_ii;
  a.qx_jj = sq.hx_jj + val.V_jj;
  a.qx_ji = sq.hx_ji + val.V_ji;
  a.qx_ij = a.qx_ji.transpose();
  a.q_i = sq.gx_i + val.v_i;
  a.q_j = sq.gx_j + val.v_j;

  if (mixed) {
    MatrixXd fold_i = sq.hux_ii * B_i;
    MatrixXd fold_j = sq.hux_jj * B_j;
    a.ht_ii = sq.hu_ii + fold_i + fold_i.transpose();
    a.ht_jj = sq.hu_jj + fold_j + fold_j.transpose();
    a.ht_ji = sq.hu_ji + B_j.transpose() * sq.hux_ij.transpose() + sq.hux_ji * B_i;
  } else {
    a.ht_ii = sq.hu_ii;
    a.ht_jj = sq.hu_jj;
    a.ht_ji = sq.hu_ji;
  }
  a.ht_ij = a.ht_ji.transpose();

  a.m_ii = B_i.transpose() * a.qx_ii * B_i + a.ht_ii;
  a.m_jj = B_j.transpose() * a.qx_jj * B_j + a.ht_jj;
  a.m_ij = B_i.transpose() * a.qx_ij * B_j + a.ht_ij;
  a.m_ji = a.m_ij.transpose();

  a.qd_ii = B_i.transpose() * a.qx_ii;
  a.qd_ij = B_i.transpose() * a.qx_ij;
  a.qd_ji = B_j.transpose() * a.qx_ji;
  a.qd_jj = B_j.transpose() * a.qx_jj;
  if (mixed) {
    a.qd_ii += sq.hux_ii;
    a.qd_ij += sq.hux_ij;
    a.qd_ji += sq.hux_ji;
    a.qd_jj += sq.hux_jj;
  }
  a.alpha_i = sq.gu_i + B_i.transpose() * a.q_i;
  a.alpha_j = sq.gu_j + B_j.transpose() * a.q_j;
}

// Cholesky of -m_kk; with opts.regularization > 0, dampen a failing block by
// -lambda*I (lambda doubling) until it is positive definite.
Eigen::LLT<MatrixXd> require_pd(MatrixXd& m_kk, AgentId agent, int t, const BackwardOptions& opts,
                                std::vector<StageNote>* notes) {
  Eigen::LLT<MatrixXd> llt((-m_kk).eval());
  if (llt.info() == Eigen::Success) return llt;
  if (opts.regularization <= 0.0) throw NonPositiveDefinitePrecision(t, agent);
  double lambda = opts.regularization;
  const MatrixXd eye = MatrixXd::Identity(m_kk.rows(), m_kk.cols());
  while (lambda < 1e15) {
    MatrixXd damped = m_kk - lambda * eye;
    llt.compute(-damped);
    if (llt.info() == Eigen::Success) {
      m_kk = std::move(damped);
      if (notes) notes->push_back({StageNote::Kind::Regularized, t, agent, lambda});
      return llt;
    }
    lambda *= 2.0;
  }
  throw NonPositiveDefinitePrecision(t, agent);
}

StageMeans solve_means_from_assemblies(const StageAssembly& a_i, const StageAssembly& a_j,
                                       const MatrixXd& A_i, const MatrixXd& A_j, int t,
                                       std::vector<StageNote>* notes) {
  const int m_i = static_cast<int>(a_i.m_ii.rows());
  const int m_j = static_cast<int>(a_j.m_jj.rows());
  const int n_i = static_cast<int>(A_i.cols());
  const int n_j = static_cast<int>(A_j.cols());

  MatrixXd sys(m_i + m_j, m_i + m_j);
  sys.topLeftCorner(m_i, m_i) = a_i.m_ii;
  sys.topRightCorner(m_i, m_j) = a_i.m_ij;
  sys.bottomLeftCorner(m_j, m_i) = a_j.m_ji;
  sys.bottomRightCorner(m_j, m_j) = a_j.m_jj;

  MatrixXd rhs(m_i + m_j, 1 + n_i + n_j);
  rhs.col(0).head(m_i) = -a_i.alpha_i;
  rhs.col(0).tail(m_j) = -a_j.alpha_j;
  rhs.block(0, 1, m_i, n_i) = -(a_i.qd_ii * A_i);
  rhs.block(m_i, 1, m_j, n_i) = -(a_j.qd_ji * A_i);
  rhs.block(0, 1 + n_i, m_i, n_j) = -(a_i.qd_ij * A_j);
  rhs.block(m_i, 1 + n_i, m_j, n_j) = -(a_j.qd_jj * A_j);

  Eigen::PartialPivLU<MatrixXd> lu(sys);
  const double rc = lu.rcond();
  if (!std::isfinite(rc) || rc < kSingularRcond) throw SingularMeanSystem(t);
  if (rc < kIllConditionedRcond && notes)
    notes->push_back({StageNote::Kind::IllConditioned, t, AgentId::I, 1.0 / rc});

  MatrixXd sol = lu.solve(rhs);
  if (!sol.allFinite()) throw SingularMeanSystem(t);

  StageMeans m;
  m.nu_i = sol.col(0).head(m_i);
  m.nu_j = sol.col(0).tail(m_j);
  m.Omega_i = sol.block(0, 1, m_i, n_i);
  m.Pi_j = sol.block(m_i, 1, m_j, n_i);
  m.Pi_i = sol.block(0, 1 + n_i, m_i, n_j);
  m.Omega_j = sol.block(m_i, 1 + n_i, m_j, n_j);
  return m;
}

void check_symmetric(const MatrixXd& m, const char* label) {
  const double dev = (m - m.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (dev > kSymmetryTol * scale)
    throw Error(std::string("internal: value recursion produced a non-symmetric ") + label);
}

// Owner's value at t-1 from its assembly and the other agent's policy
// coefficients. s = the owner, o = the other agent.
struct RoleView {
  const MatrixXd *A_s, *A_o;
  const MatrixXd *m_ss, *m_so, *m_os, *m_oo;
  const MatrixXd *qx_ss, *qx_oo, *qx_os;
  const MatrixXd *qd_ss, *qd_so, *qd_os, *qd_oo;
  const VectorXd *q_s, *q_o;
  const VectorXd *alpha_s, *alpha_o;
};

RoleView role_view(AgentId owner, const StageAssembly& a, const MatrixXd& A_i,
                   const MatrixXd& A_j) {
  if (owner == AgentId::I)
    return {&A_i,      &A_j,      &a.m_ii,  &a.m_ij,  &a.m_ji,  &a.m_jj,
            &a.qx_ii,  &a.qx_jj,  &a.qx_ji, &a.qd_ii, &a.qd_ij, &a.qd_ji,
            &a.qd_jj,  &a.q_i,    &a.q_j,   &a.alpha_i, &a.alpha_j};
  return {&A_j,      &A_i,      &a.m_jj,  &a.m_ji,  &a.m_ij,  &a.m_ii,
          &a.qx_jj,  &a.qx_ii,  &a.qx_ij, &a.qd_jj, &a.qd_ji, &a.qd_ij,
          &a.qd_ii,  &a.q_j,    &a.q_i,   &a.alpha_j, &a.alpha_i};
}

// nu_o, Pi_o (response to the owner's state), Omega_o (own state) of the
// other agent's policy.
QuadraticValue value_step_core(AgentId owner, const StageAssembly& a, const MatrixXd& A_i,
                               const MatrixXd& A_j, const VectorXd& nu_o, const MatrixXd& Pi_o,
                               const MatrixXd& Omega_o) {
  const RoleView v = role_view(owner, a, A_i, A_j);
  const MatrixXd minv =
      -Eigen::LLT<MatrixXd>((-*v.m_ss).eval())
           .solve(MatrixXd::Identity(v.m_ss->rows(), v.m_ss->cols()));

  // Qstar_(nm) = Qdagger_(mn)'
  const MatrixXd qs_ss = v.qd_ss->transpose();
  const MatrixXd qs_so = v.qd_os->transpose();
  const MatrixXd qs_oo = v.qd_oo->transpose();
  const MatrixXd qs_os = v.qd_so->transpose();

  const MatrixXd S = *v.m_oo - *v.m_os * minv * *v.m_so;
  const MatrixXd W_s = v.A_s->transpose() * (qs_so - qs_ss * minv * *v.m_so);
  const MatrixXd W_o = v.A_o->transpose() * (qs_oo - qs_os * minv * *v.m_so);

  MatrixXd V_ss = Pi_o.transpose() * S * Pi_o + W_s * Pi_o + (W_s * Pi_o).transpose() +
                  v.A_s->transpose() * *v.qx_ss * *v.A_s -
                  v.A_s->transpose() * qs_ss * minv * *v.qd_ss * *v.A_s;
  MatrixXd V_oo = Omega_o.transpose() * S * Omega_o + W_o * Omega_o +
                  (W_o * Omega_o).transpose() + v.A_o->transpose() * *v.qx_oo * *v.A_o -
                  v.A_o->transpose() * qs_os * minv * *v.qd_so * *v.A_o;
  MatrixXd V_os = Omega_o.transpose() * S * Pi_o + Omega_o.transpose() * W_s.transpose() +
                  W_o * Pi_o + v.A_o->transpose() * *v.qx_os * *v.A_s -
                  v.A_o->transpose() * qs_os * minv * *v.qd_ss * *v.A_s;

  const VectorXd h = *v.alpha_o - *v.m_os * (minv * *v.alpha_s);
  VectorXd v_o = Omega_o.transpose() * (S * nu_o + h) + W_o * nu_o +
                 v.A_o->transpose() * *v.q_o -
                 v.A_o->transpose() * (qs_os * (minv * *v.alpha_s));
  VectorXd v_s = Pi_o.transpose() * (S * nu_o + h) + W_s * nu_o +
                 v.A_s->transpose() * *v.q_s -
                 v.A_s->transpose() * (qs_ss * (minv * *v.alpha_s));

  check_symmetric(V_ss, "own-state block");
  check_symmetric(V_oo, "other-state block");
  V_ss = 0.5 * (V_ss + V_ss.transpose()).eval();
  V_oo = 0.5 * (V_oo + V_oo.transpose()).eval();

  QuadraticValue out;
  if (owner == AgentId::I) {
    out.V_ii = std::move(V_ss);
    out.V_jj = std::move(V_oo);
    out.V_ji = std::move(V_os);   // other(j)-by-self(i)
    out.v_i = std::move(v_s);
    out.v_j = std::move(v_o);
  } else {
    out.V_jj = std::move(V_ss);
    out.V_ii = std::move(V_oo);
    out.V_ji = V_os.transpose();  // V_os is i-by-j here
    out.v_j = std::move(v_s);
    out.v_i = std::move(v_o);
  }
  return out;
}

void check_shared_reference(const QuadraticExpansion& ei, const QuadraticExpansion& ej) {
  if (ei.horizon() != ej.horizon())
    throw DimensionMismatch("expansions have different horizons");
  if (ei.reference != ej.reference &&
      !(ei.reference && ej.reference && approx_equal(*ei.reference, *ej.reference, 0.0)))
    throw DimensionMismatch("expansions must share the reference trajectory");
}

}  // namespace

std::pair<PrecisionBlocks, PrecisionBlocks> compute_precisions(
    const QuadraticExpansion& expansion_i, const QuadraticExpansion& expansion_j,
    const LinearizedDynamics& lin, const QuadraticValue& value_i, const QuadraticValue& value_j,
    int t) {
  StageAssembly a_i, a_j;
  assemble(expansion_i.at(t), value_i, lin.B(AgentId::I, t), lin.B(AgentId::J, t),
           expansion_i.has_mixed_blocks, a_i);
  assemble(expansion_j.at(t), value_j, lin.B(AgentId::I, t), lin.B(AgentId::J, t),
           expansion_j.has_mixed_blocks, a_j);
  return {PrecisionBlocks{a_i.m_ii, a_i.m_ij, a_i.m_ji, a_i.m_jj},
          PrecisionBlocks{a_j.m_ii, a_j.m_ij, a_j.m_ji, a_j.m_jj}};
}

StageMeans solve_stage_means(const PrecisionBlocks& prec_i, const PrecisionBlocks& prec_j,
                             const QuadraticExpansion& expansion_i,
                             const QuadraticExpansion& expansion_j, const LinearizedDynamics& lin,
                             const QuadraticValue& value_i, const QuadraticValue& value_j, int t,
                             std::vector<StageNote>* notes) {
  StageAssembly a_i, a_j;
  assemble(expansion_i.at(t), value_i, lin.B(AgentId::I, t), lin.B(AgentId::J, t),
           expansion_i.has_mixed_blocks, a_i);
  assemble(expansion_j.at(t), value_j, lin.B(AgentId::I, t), lin.B(AgentId::J, t),
           expansion_j.has_mixed_blocks, a_j);
  // honor caller-provided (possibly regularized) precision blocks
  a_i.m_ii = prec_i.m_ii;
  a_i.m_ij = prec_i.m_ij;
  a_j.m_ji = prec_j.m_ji;
  a_j.m_jj = prec_j.m_jj;
  return solve_means_from_assemblies(a_i, a_j, lin.A(AgentId::I, t), lin.A(AgentId::J, t), t,
                                     notes);
}

QuadraticValue value_step(AgentId owner, const PrecisionBlocks& prec_owner,
                          const StageMeans& means, const QuadraticExpansion& expansion_owner,
                          const LinearizedDynamics& lin, const QuadraticValue& value_owner,
                          int t) {
  StageAssembly a;
  assemble(expansion_owner.at(t), value_owner, lin.B(AgentId::I, t), lin.B(AgentId::J, t),
           expansion_owner.has_mixed_blocks, a);
  a.m_ii = prec_owner.m_ii;
  a.m_ij = prec_owner.m_ij;
  a.m_ji = prec_owner.m_ji;
  a.m_jj = prec_owner.m_jj;
  if (owner == AgentId::I)
    return value_step_core(owner, a, lin.A(AgentId::I, t), lin.A(AgentId::J, t), means.nu_j,
                           means.Pi_j, means.Omega_j);
  return value_step_core(owner, a, lin.A(AgentId::I, t), lin.A(AgentId::J, t), means.nu_i,
                         means.Pi_i, means.Omega_i);
}

BackwardResult gs_cioc_backward(const QuadraticExpansion& expansion_i,
                                const QuadraticExpansion& expansion_j,
                                const LinearizedDynamics& lin, const BackwardOptions& opts) {
  check_shared_reference(expansion_i, expansion_j);
  const int T = expansion_i.horizon();
  if (lin.horizon() != T) throw DimensionMismatch("linearization horizon mismatch");
  const auto& ref = *expansion_i.reference;
  const int n_i = static_cast<int>(ref.states[0].x_i.size());
  const int n_j = static_cast<int>(ref.states[0].x_j.size());

  BackwardResult out;
  out.policy_i.owner = AgentId::I;
  out.policy_j.owner = AgentId::J;
  out.policy_i.reference = expansion_i.reference;
  out.policy_j.reference = expansion_i.reference;
  out.policy_i.stages.resize(T);
  out.policy_j.stages.resize(T);

  QuadraticValue value_i = QuadraticValue::zero(n_i, n_j);
  QuadraticValue value_j = QuadraticValue::zero(n_i, n_j);

  StageAssembly a_i, a_j;
  for (int t = T; t >= 1; --t) {
    const MatrixXd& A_i = lin.A(AgentId::I, t);
    const MatrixXd& A_j = lin.A(AgentId::J, t);
    const MatrixXd& B_i = lin.B(AgentId::I, t);
    const MatrixXd& B_j = lin.B(AgentId::J, t);
    assemble(expansion_i.at(t), value_i, B_i, B_j, expansion_i.has_mixed_blocks, a_i);
    assemble(expansion_j.at(t), value_j, B_i, B_j, expansion_j.has_mixed_blocks, a_j);

    auto llt_i = require_pd(a_i.m_ii, AgentId::I, t, opts, &out.notes);
    auto llt_j = require_pd(a_j.m_jj, AgentId::J, t, opts, &out.notes);

    StageMeans means = solve_means_from_assemblies(a_i, a_j, A_i, A_j, t, &out.notes);

    StagePolicy& p_i = out.policy_i.stages[t - 1];
    p_i.nu = means.nu_i;
    p_i.Pi = means.Pi_i;
    p_i.Omega = means.Omega_i;
    p_i.precision = -a_i.m_ii;
    p_i.covariance = llt_i.solve(MatrixXd::Identity(p_i.precision.rows(), p_i.precision.cols()));

    StagePolicy& p_j = out.policy_j.stages[t - 1];
    p_j.nu = means.nu_j;
    p_j.Pi = means.Pi_j;
    p_j.Omega = means.Omega_j;
    p_j.precision = -a_j.m_jj;
    p_j.covariance = llt_j.solve(MatrixXd::Identity(p_j.precision.rows(), p_j.precision.cols()));

    if (t > 1) {
      value_i = value_step_core(AgentId::I, a_i, A_i, A_j, means.nu_j, means.Pi_j, means.Omega_j);
      value_j = value_step_core(AgentId::J, a_j, A_i, A_j, means.nu_i, means.Pi_i, means.Omega_i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Single-agent recursion (shared by the joint-agent and frozen-other
// baselines): M = Htilde + B' Qhat B, mean feedback -M^{-1}(Qdagger A), value
// V' = A'Qhat A - A'Qstar M^{-1} Qdagger A.
// ---------------------------------------------------------------------------

namespace {

struct SingleStage {
  VectorXd nu;
  MatrixXd K;
  MatrixXd precision, covariance;
};

struct SingleState {
  MatrixXd V;
  VectorXd v;
};

SingleStage single_agent_stage(const MatrixXd& hxx, const MatrixXd& huu, const MatrixXd& hux,
                               const VectorXd& gx, const VectorXd& gu, const MatrixXd& A,
                               const MatrixXd& B, SingleState& val, AgentId tag, int t,
                               const BackwardOptions& opts, std::vector<StageNote>* notes,
                               bool update_value) {
  const MatrixXd qx = hxx + val.V;
  const VectorXd q = gx + val.v;
  const MatrixXd fold = hux * B;
  MatrixXd m = huu + fold + fold.transpose() + B.transpose() * qx * B;
  auto llt = require_pd(m, tag, t, opts, notes);
  const MatrixXd qd = hux + B.transpose() * qx;
  const VectorXd alpha = gu + B.transpose() * q;

  SingleStage st;
  st.precision = -m;
  st.covariance = llt.solve(MatrixXd::Identity(m.rows(), m.cols()));
  const MatrixXd minv = -st.covariance;
  st.nu = -(minv * alpha);
  st.K = -(minv * (qd * A));

  if (update_value) {
    const MatrixXd qs = qd.transpose();
    MatrixXd Vn = A.transpose() * qx * A - A.transpose() * qs * minv * qd * A;
    check_symmetric(Vn, "single-agent value block");
    val.V = 0.5 * (Vn + Vn.transpose()).eval();
    val.v = A.transpose() * q - A.transpose() * (qs * (minv * alpha));
  }
  return st;
}

}  // namespace

JointPolicySequence m_cioc_backward(const QuadraticExpansion& joint_expansion,
                                    const LinearizedDynamics& lin, const BackwardOptions& opts) {
  const int T = joint_expansion.horizon();
  if (lin.horizon() != T) throw DimensionMismatch("linearization horizon mismatch");
  const auto& ref = *joint_expansion.reference;
  const int n_i = static_cast<int>(ref.states[0].x_i.size());
  const int n_j = static_cast<int>(ref.states[0].x_j.size());
  const int m_i = static_cast<int>(ref.actions_i[0].size());
  const int m_j = static_cast<int>(ref.actions_j[0].size());
  const int n = n_i + n_j, m = m_i + m_j;

  JointPolicySequence seq;
  seq.reference = joint_expansion.reference;
  seq.action_dim_i = m_i;
  seq.stages.resize(T);

  SingleState val{MatrixXd::Zero(n, n), VectorXd::Zero(n)};
  std::vector<StageNote> notes;
  for (int t = T; t >= 1; --t) {
    const StageQuadratic& sq = joint_expansion.at(t);
    MatrixXd hxx(n, n), huu(m, m), hux(m, n), A = MatrixXd::Zero(n, n),
             B = MatrixXd::Zero(n, m);
    hxx << sq.hx_ii, sq.hx_ji.transpose(), sq.hx_ji, sq.hx_jj;
    huu << sq.hu_ii, sq.hu_ji.transpose(), sq.hu_ji, sq.hu_jj;
    hux << sq.hux_ii, sq.hux_ij, sq.hux_ji, sq.hux_jj;
    A.topLeftCorner(n_i, n_i) = lin.A(AgentId::I, t);
    A.bottomRightCorner(n_j, n_j) = lin.A(AgentId::J, t);
    B.topLeftCorner(n_i, m_i) = lin.B(AgentId::I, t);
    B.bottomRightCorner(n_j, m_j) = lin.B(AgentId::J, t);
    VectorXd gx(n), gu(m);
    gx << sq.gx_i, sq.gx_j;
    gu << sq.gu_i, sq.gu_j;

    SingleStage st = single_agent_stage(hxx, huu, hux, gx, gu, A, B, val, AgentId::I, t, opts,
                                        &notes, t > 1);
    JointStagePolicy& p = seq.stages[t - 1];
    p.nu = std::move(st.nu);
    p.K_i = st.K.leftCols(n_i);
    p.K_j = st.K.rightCols(n_j);
    p.precision = std::move(st.precision);
    p.covariance = std::move(st.covariance);
  }
  return seq;
}

PolicySequence single_agent_cioc_backward(const QuadraticExpansion& expansion,
                                          const LinearizedDynamics& lin,
                                          const BackwardOptions& opts) {
  const int T = expansion.horizon();
  if (lin.horizon() != T) throw DimensionMismatch("linearization horizon mismatch");
  const AgentId k = expansion.owner;
  const auto& ref = *expansion.reference;
  const int n = static_cast<int>(ref.states[0].of(k).size());
  const int n_other = static_cast<int>(ref.states[0].of(other(k)).size());

  PolicySequence seq;
  seq.owner = k;
  seq.reference = expansion.reference;
  seq.stages.resize(T);

  SingleState val{MatrixXd::Zero(n, n), VectorXd::Zero(n)};
  std::vector<StageNote> notes;
  for (int t = T; t >= 1; --t) {
    const StageQuadratic& sq = expansion.at(t);
    const bool is_i = (k == AgentId::I);
    const MatrixXd& hxx = is_i ? sq.hx_ii : sq.hx_jj;
    const MatrixXd& huu = is_i ? sq.hu_ii : sq.hu_jj;
    const MatrixXd& hux = is_i ? sq.hux_ii : sq.hux_jj;
    const VectorXd& gx = is_i ? sq.gx_i : sq.gx_j;
    const VectorXd& gu = is_i ? sq.gu_i : sq.gu_j;

    SingleStage st = single_agent_stage(hxx, huu, hux, gx, gu, lin.A(k, t), lin.B(k, t), val, k,
                                        t, opts, &notes, t > 1);
    StagePolicy& p = seq.stages[t - 1];
    p.nu = std::move(st.nu);
    p.Omega = std::move(st.K);
    p.Pi = MatrixXd::Zero(p.nu.size(), n_other);
    p.precision = std::move(st.precision);
    p.covariance = std::move(st.covariance);
  }
  return seq;
}

AbsoluteStagePolicy to_absolute(const PolicySequence& seq, int t) {
  const StagePolicy& p = seq.at(t);
  const JointTrajectory& ref = *seq.reference;
  const AgentId k = seq.owner;
  const VectorXd& x_own = ref.states[t - 1].of(k);
  const VectorXd& x_other = ref.states[t - 1].of(other(k));
  AbsoluteStagePolicy a;
  a.constant = ref.action(k, t) + p.nu - p.Pi * x_other - p.Omega * x_own;
  a.gain_other = p.Pi;
  a.gain_own = p.Omega;
  a.precision = p.precision;
  return a;
}

}  // namespace trajgame

#include "trajgame/core/reward.hpp"

#include <cmath>

namespace trajgame {

void StageQuadratic::set_zero(int n_i, int n_j, int m_i, int m_j) {
  r = 0.0;
  hx_ii = MatrixXd::Zero(n_i, n_i);
  hx_jj = MatrixXd::Zero(n_j, n_j);
  hx_ji = MatrixXd::Zero(n_j, n_i);
  hu_ii = MatrixXd::Zero(m_i, m_i);
  hu_jj = MatrixXd::Zero(m_j, m_j);
  hu_ji = MatrixXd::Zero(m_j, m_i);
  hux_ii = MatrixXd::Zero(m_i, n_i);
  hux_ij = MatrixXd::Zero(m_i, n_j);
  hux_ji = MatrixXd::Zero(m_j, n_i);
  hux_jj = MatrixXd::Zero(m_j, n_j);
  gx_i = VectorXd::Zero(n_i);
  gx_j = VectorXd::Zero(n_j);
  gu_i = VectorXd::Zero(m_i);
  gu_j = VectorXd::Zero(m_j);
}

bool StageQuadratic::all_finite() const {
  return std::isfinite(r) && hx_ii.allFinite() && hx_jj.allFinite() && hx_ji.allFinite() &&
         hu_ii.allFinite() && hu_jj.allFinite() && hu_ji.allFinite() && hux_ii.allFinite() &&
         hux_ij.allFinite() && hux_ji.allFinite() && hux_jj.allFinite() && gx_i.allFinite() &&
         gx_j.allFinite() && gu_i.allFinite() && gu_j.allFinite();
}

double StageQuadratic::evaluate(const VectorXd& xi, const VectorXd& xj, const VectorXd& ui,
                                const VectorXd& uj) const {
  double v = r;
  v += 0.5 * xi.dot(hx_ii * xi) + 0.5 * xj.dot(hx_jj * xj) + xj.dot(hx_ji * xi);
  v += 0.5 * ui.dot(hu_ii * ui) + 0.5 * uj.dot(hu_jj * uj) + uj.dot(hu_ji * ui);
  v += ui.dot(hux_ii * xi) + ui.dot(hux_ij * xj) + uj.dot(hux_ji * xi) + uj.dot(hux_jj * xj);
  v += gx_i.dot(xi) + gx_j.dot(xj) + gu_i.dot(ui) + gu_j.dot(uj);
  return v;
}

void RewardTerm::accumulate(const StagePoint&, StageQuadratic&) const {
  throw Error("term '" + type_name() + "' has no analytic derivatives");
}

// ---------------------------------------------------------------------------

double QuadraticGoalTerm::value(const StagePoint& p) const {
  const VectorXd& x = subject_ == AgentId::I ? p.x_i : p.x_j;
  return -weight_.resolve(p.theta) * (x - target_).squaredNorm();
}

void QuadraticGoalTerm::accumulate(const StagePoint& p, StageQuadratic& out) const {
  const double w = weight_.resolve(p.theta);
  const VectorXd& x = subject_ == AgentId::I ? p.x_i : p.x_j;
  if (x.size() != target_.size()) throw DimensionMismatch("goal target dimension mismatch");
  out.r += -w * (x - target_).squaredNorm();
  VectorXd g = -2.0 * w * (x - target_);
  if (subject_ == AgentId::I) {
    out.gx_i += g;
    out.hx_ii.diagonal().array() += -2.0 * w;
  } else {
    out.gx_j += g;
    out.hx_jj.diagonal().array() += -2.0 * w;
  }
}

double QuadraticLaneTerm::value(const StagePoint& p) const {
  const VectorXd& x = subject_ == AgentId::I ? p.x_i : p.x_j;
  const double d = x[axis_] - center_;
  return -weight_.resolve(p.theta) * d * d;
}

void QuadraticLaneTerm::accumulate(const StagePoint& p, StageQuadratic& out) const {
  const double w = weight_.resolve(p.theta);
  const VectorXd& x = subject_ == AgentId::I ? p.x_i : p.x_j;
  if (axis_ < 0 || axis_ >= x.size()) throw DimensionMismatch("lane axis out of range");
  const double d = x[axis_] - center_;
  out.r += -w * d * d;
  if (subject_ == AgentId::I) {
    out.gx_i[axis_] += -2.0 * w * d;
    out.hx_ii(axis_, axis_) += -2.0 * w;
  } else {
    out.gx_j[axis_] += -2.0 * w * d;
    out.hx_jj(axis_, axis_) += -2.0 * w;
  }
}

double QuadraticVelocityTerm::value(const StagePoint& p) const {
  const VectorXd& u = subject_ == AgentId::I ? p.u_i : p.u_j;
  return -weight_.resolve(p.theta) * (u - target_).squaredNorm();
}

void QuadraticVelocityTerm::accumulate(const StagePoint& p, StageQuadratic& out) const {
  const double w = weight_.resolve(p.theta);
  const VectorXd& u = subject_ == AgentId::I ? p.u_i : p.u_j;
  if (u.size() != target_.size()) throw DimensionMismatch("velocity target dimension mismatch");
  out.r += -w * (u - target_).squaredNorm();
  VectorXd g = -2.0 * w * (u - target_);
  if (subject_ == AgentId::I) {
    out.gu_i += g;
    out.hu_ii.diagonal().array() += -2.0 * w;
  } else {
    out.gu_j += g;
    out.hu_jj.diagonal().array() += -2.0 * w;
  }
}

double CoupledActionTerm::value(const StagePoint& p) const {
  return -weight_.resolve(p.theta) * (p.u_i + p.u_j).squaredNorm();
}

void CoupledActionTerm::accumulate(const StagePoint& p, StageQuadratic& out) const {
  const double w = weight_.resolve(p.theta);
  if (p.u_i.size() != p.u_j.size())
    throw DimensionMismatch("coupled action term needs equal action dimensions");
  const VectorXd s = p.u_i + p.u_j;
  out.r += -w * s.squaredNorm();
  out.gu_i += -2.0 * w * s;
  out.gu_j += -2.0 * w * s;
  out.hu_ii.diagonal().array() += -2.0 * w;
  out.hu_jj.diagonal().array() += -2.0 * w;
  out.hu_ji.diagonal().array() += -2.0 * w;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double dsigmoid(double z) {
  const double s = sigmoid(z);
  return s * (1.0 - s);
}
double d2sigmoid(double z) {
  const double s = sigmoid(z);
  return s * (1.0 - s) * (1.0 - 2.0 * s);
}
double sign0(double z) { return z > 0 ? 1.0 : (z < 0 ? -1.0 : 0.0); }

// f(x) = log(|x| + 0.1) * sigmoid(6 - x) * sigmoid(x), with derivatives.
void car_factor(double x, double& f, double& df, double& d2f) {
  const double L = std::log(std::abs(x) + 0.1);
  const double dL = sign0(x) / (std::abs(x) + 0.1);
  const double d2L = -1.0 / ((std::abs(x) + 0.1) * (std::abs(x) + 0.1));
  const double a = sigmoid(6.0 - x);
  const double da = -dsigmoid(6.0 - x);
  const double d2a = d2sigmoid(6.0 - x);
  const double b = sigmoid(x);
  const double db = dsigmoid(x);
  const double d2b = d2sigmoid(x);
  f = L * a * b;
  df = dL * a * b + L * da * b + L * a * db;
  d2f = d2L * a * b + L * d2a * b + L * a * d2b +
        2.0 * (dL * da * b + dL * a * db + L * da * db);
}

}  // namespace

double ZebraInteractionTerm::value(const StagePoint& p) const {
  const double xc = (car_ == AgentId::I ? p.x_i : p.x_j)[car_axis_];
  const double yp = (ped_ == AgentId::I ? p.x_i : p.x_j)[ped_axis_];
  return weight_.resolve(p.theta) * std::log(std::abs(xc) + 0.1) * sigmoid(6.0 - xc) *
         sigmoid(xc) * sigmoid(-yp);
}

void ZebraInteractionTerm::accumulate(const StagePoint& p, StageQuadratic& out) const {
  if (car_ == ped_) throw SchemaError("zebra interaction needs two distinct agents");
  const double w = weight_.resolve(p.theta);
  const double xc = (car_ == AgentId::I ? p.x_i : p.x_j)[car_axis_];
  const double yp = (ped_ == AgentId::I ? p.x_i : p.x_j)[ped_axis_];
  double f, df, d2f;
  car_factor(xc, f, df, d2f);
  const double g = sigmoid(-yp);
  const double dg = -dsigmoid(-yp);
  const double d2g = d2sigmoid(-yp);

  out.r += w * f * g;
  // gradient / Hessian entries on the (car_axis, ped_axis) coordinates
  auto& gx_car = car_ == AgentId::I ? out.gx_i : out.gx_j;
  auto& gx_ped = ped_ == AgentId::I ? out.gx_i : out.gx_j;
  gx_car[car_axis_] += w * df * g;
  gx_ped[ped_axis_] += w * f * dg;

  auto& h_car = car_ == AgentId::I ? out.hx_ii : out.hx_jj;
  auto& h_ped = ped_ == AgentId::I ? out.hx_ii : out.hx_jj;
  h_car(car_axis_, car_axis_) += w * d2f * g;
  h_ped(ped_axis_, ped_axis_) += w * f * d2g;
  // cross block stored as hx_ji = d2r / dx_j dx_i
  if (car_ == AgentId::I)
    out.hx_ji(ped_axis_, car_axis_) += w * df * dg;
  else
    out.hx_ji(car_axis_, ped_axis_) += w * df * dg;
}

// ---------------------------------------------------------------------------

double RewardModel::value(const VectorXd& x_i, const VectorXd& x_j, const VectorXd& u_i,
                          const VectorXd& u_j) const {
  StagePoint p{x_i, x_j, u_i, u_j, theta};
  double v = 0.0;
  for (const auto& term : terms) v += term->value(p);
  return v;
}

double RewardModel::total(const JointTrajectory& traj) const {
  double v = 0.0;
  for (int t = 1; t <= traj.horizon(); ++t)
    v += value(traj.states[t].x_i, traj.states[t].x_j, traj.action(AgentId::I, t),
               traj.action(AgentId::J, t));
  return v;
}

}  // namespace trajgame

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "trajgame/core/types.hpp"

namespace trajgame {

// One stage of a second-order reward expansion in deviation coordinates.
// Mixed blocks are stored action-by-state (hux_nm = d2r / du_n dx_m); the
// state-by-action counterparts are their transposes.
struct StageQuadratic {
  double r = 0.0;
  MatrixXd hx_ii, hx_jj, hx_ji;             // d2r / dx_n dx_m
  MatrixXd hu_ii, hu_jj, hu_ji;             // d2r / du_n du_m
  MatrixXd hux_ii, hux_ij, hux_ji, hux_jj;  // d2r / du_n dx_m
  VectorXd gx_i, gx_j, gu_i, gu_j;

  void set_zero(int n_i, int n_j, int m_i, int m_j);
  bool all_finite() const;

  // Evaluates the quadratic form at a deviation point (plus the constant r).
  double evaluate(const VectorXd& xbar_i, const VectorXd& xbar_j, const VectorXd& ubar_i,
                  const VectorXd& ubar_j) const;
};

// Evaluation point of a reward at one stage, in scenario (absolute) units.
struct StagePoint {
  const VectorXd& x_i;
  const VectorXd& x_j;
  const VectorXd& u_i;
  const VectorXd& u_j;
  const VectorXd& theta;
};

// Weight of a reward term: either a fixed value or a slot in theta.
struct Coefficient {
  double value = 0.0;
  int theta_index = -1;

  static Coefficient fixed(double v) { return {v, -1}; }
  static Coefficient slot(int idx) { return {0.0, idx}; }

  double resolve(const VectorXd& theta) const {
    if (theta_index < 0) return value;
    if (theta_index >= theta.size()) throw DimensionMismatch("theta index out of range");
    return theta[theta_index];
  }
};

class RewardTerm {
 public:
  virtual ~RewardTerm() = default;
  virtual double value(const StagePoint& p) const = 0;
  // Analytic terms add their value, gradients and Hessians into `out`
  // (derivatives taken at p, in deviation coordinates). Non-analytic terms
  // are differentiated by central finite differences in taylor_expand.
  virtual bool analytic() const { return false; }
  virtual void accumulate(const StagePoint& p, StageQuadratic& out) const;
  virtual std::string type_name() const = 0;
};

// -w * ||x_s - target||^2 on agent s's sub-state
class QuadraticGoalTerm final : public RewardTerm {
 public:
  QuadraticGoalTerm(AgentId subject, Coefficient weight, VectorXd target)
      : subject_(subject), weight_(weight), target_(std::move(target)) {}
  double value(const StagePoint& p) const override;
  bool analytic() const override { return true; }
  void accumulate(const StagePoint& p, StageQuadratic& out) const override;
  std::string type_name() const override { return "quadratic_goal"; }
  AgentId subject() const { return subject_; }
  const Coefficient& weight() const { return weight_; }
  const VectorXd& target() const { return target_; }

 private:
  AgentId subject_;
  Coefficient weight_;
  VectorXd target_;
};

// -w * (x_s[axis] - center)^2
class QuadraticLaneTerm final : public RewardTerm {
 public:
  QuadraticLaneTerm(AgentId subject, Coefficient weight, int axis, double center)
      : subject_(subject), weight_(weight), axis_(axis), center_(center) {}
  double value(const StagePoint& p) const override;
  bool analytic() const override { return true; }
  void accumulate(const StagePoint& p, StageQuadratic& out) const override;
  std::string type_name() const override { return "quadratic_lane"; }
  AgentId subject() const { return subject_; }
  const Coefficient& weight() const { return weight_; }
  int axis() const { return axis_; }
  double center() const { return center_; }

 private:
  AgentId subject_;
  Coefficient weight_;
  int axis_;
  double center_;
};

// -w * ||u_s - target||^2; with a nonzero target this penalizes deviation
// from a preferred per-step displacement, with a zero target it is a plain
// action cost.
class QuadraticVelocityTerm final : public RewardTerm {
 public:
  QuadraticVelocityTerm(AgentId subject, Coefficient weight, VectorXd target)
      : subject_(subject), weight_(weight), target_(std::move(target)) {}
  double value(const StagePoint& p) const override;
  bool analytic() const override { return true; }
  void accumulate(const StagePoint& p, StageQuadratic& out) const override;
  std::string type_name() const override { return "quadratic_velocity"; }
  AgentId subject() const { return subject_; }
  const Coefficient& weight() const { return weight_; }
  const VectorXd& target() const { return target_; }

 private:
  AgentId subject_;
  Coefficient weight_;
  VectorXd target_;
};

// -w * ||u_i + u_j||^2, the coupling term of the group-goal game
class CoupledActionTerm final : public RewardTerm {
 public:
  explicit CoupledActionTerm(Coefficient weight) : weight_(weight) {}
  double value(const StagePoint& p) const override;
  bool analytic() const override { return true; }
  void accumulate(const StagePoint& p, StageQuadratic& out) const override;
  std::string type_name() const override { return "coupled_action"; }
  const Coefficient& weight() const { return weight_; }

 private:
  Coefficient weight_;
};

// w * log(|x_c| + 0.1) * sigmoid(6 - x_c) * sigmoid(x_c) * sigmoid(-y_p)
// where x_c is the car's offset to the intersection point and y_p is the
// pedestrian's. Rewards holding back in the approach window while the
// pedestrian has not cleared the crossing and punishes entering the conflict
// zone.
class ZebraInteractionTerm final : public RewardTerm {
 public:
  ZebraInteractionTerm(AgentId car, AgentId pedestrian, Coefficient weight, int car_axis = 0,
                       int ped_axis = 0)
      : car_(car), ped_(pedestrian), weight_(weight), car_axis_(car_axis), ped_axis_(ped_axis) {}
  double value(const StagePoint& p) const override;
  bool analytic() const override { return true; }
  void accumulate(const StagePoint& p, StageQuadratic& out) const override;
  std::string type_name() const override { return "zebra_interaction"; }
  AgentId car() const { return car_; }
  AgentId pedestrian() const { return ped_; }
  const Coefficient& weight() const { return weight_; }

 private:
  AgentId car_;
  AgentId ped_;
  Coefficient weight_;
  int car_axis_;
  int ped_axis_;
};

// Parameterized per-agent reward r_k(x_t, u_it, u_jt; theta).
struct RewardModel {
  AgentId owner = AgentId::I;
  VectorXd theta;
  std::vector<std::shared_ptr<const RewardTerm>> terms;

  double value(const VectorXd& x_i, const VectorXd& x_j, const VectorXd& u_i,
               const VectorXd& u_j) const;

  // Sum of stage rewards r(x_t, u_it, u_jt) over t = 1..T.
  double total(const JointTrajectory& traj) const;

  RewardModel with_theta(VectorXd new_theta) const {
    RewardModel m = *this;
    m.theta = std::move(new_theta);
    return m;
  }
};

}  // namespace trajgame

#include "trajgame/inference/inference.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <thread>

#include "trajgame/core/expansion.hpp"
#include "trajgame/solver/value_recursion.hpp"

namespace trajgame {

void Demonstration::validate() const {
  if (trajectories.empty()) throw SchemaError("demonstration has no trajectories");
  if (!dynamics) throw SchemaError("demonstration lacks a dynamics binding");
  const auto& first = trajectories[0];
  for (const auto& tr : trajectories) {
    tr.check_consistent();
    if (!tr.same_shape_as(first))
      throw DimensionMismatch("demonstration trajectories differ in shape");
  }
}

void InferenceConfig::validate() const {
  if (theta0.size() == 0) throw SchemaError("theta0 is empty");
  if (!(learning_rate > 0.0)) throw SchemaError("learning_rate must be positive");
  if (max_iterations < 1) throw SchemaError("max_iterations must be >= 1");
  if (grad_tol < 0.0) throw SchemaError("grad_tol must be >= 0");
  if (!(fd_step > 0.0)) throw SchemaError("fd_step must be positive");
}

namespace {

// log N(0; nu, P^{-1}) = .5 log|P| - (m/2) log(2pi) - .5 nu' P nu
// At the reference the observed deviation is zero and the policy mean
// deviation is nu.
double stage_log_density(const VectorXd& nu, const MatrixXd& precision) {
  Eigen::LLT<MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw NumericalError("stage precision lost positive definiteness in likelihood");
  const double logdet = 2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  const double m = static_cast<double>(nu.size());
  return 0.5 * logdet - 0.5 * m * std::log(2.0 * M_PI) - 0.5 * nu.dot(precision * nu);
}

double trajectory_log_likelihood(const VectorXd& theta, const Demonstration& demo,
                                 const JointTrajectory& traj, LikelihoodBackend backend,
                                 size_t index) {
  try {
    auto ref = std::make_shared<const JointTrajectory>(traj);
    const LinearizedDynamics lin = linearize(*demo.dynamics, *ref);
    double ll = 0.0;
    if (backend == LikelihoodBackend::GsCioc) {
      const QuadraticExpansion exp_i = taylor_expand(demo.reward_i.with_theta(theta), ref);
      const QuadraticExpansion exp_j = taylor_expand(demo.reward_j.with_theta(theta), ref);
      const BackwardResult bw = gs_cioc_backward(exp_i, exp_j, lin);
      for (int t = 1; t <= traj.horizon(); ++t) {
        ll += stage_log_density(bw.policy_i.at(t).nu, bw.policy_i.at(t).precision);
        ll += stage_log_density(bw.policy_j.at(t).nu, bw.policy_j.at(t).precision);
      }
    } else {
      const AgentId k =
          backend == LikelihoodBackend::SingleAgentI ? AgentId::I : AgentId::J;
      const RewardModel& reward = k == AgentId::I ? demo.reward_i : demo.reward_j;
      const QuadraticExpansion exp = taylor_expand(reward.with_theta(theta), ref);
      const PolicySequence pol = single_agent_cioc_backward(exp, lin);
      for (int t = 1; t <= traj.horizon(); ++t)
        ll += stage_log_density(pol.at(t).nu, pol.at(t).precision);
    }
    return ll;
  } catch (const NumericalError& e) {
    throw NumericalError("trajectory " + std::to_string(index) + ": " + e.what());
  }
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

double log_likelihood(const VectorXd& theta, const Demonstration& demo,
                      LikelihoodBackend backend, int threads) {
  demo.validate();
  const size_t n = demo.trajectories.size();
  std::vector<double> terms(n);
  const int workers = std::min<int>(resolve_threads(threads), static_cast<int>(n));
  if (workers <= 1) {
    for (size_t k = 0; k < n; ++k)
      terms[k] = trajectory_log_likelihood(theta, demo, demo.trajectories[k], backend, k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (size_t k = w; k < n; k += workers)
            terms[k] = trajectory_log_likelihood(theta, demo, demo.trajectories[k], backend, k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  // fixed-order reduction for determinism
  double sum = 0.0;
  for (double v : terms) sum += v;
  return sum / static_cast<double>(n);
}

VectorXd grad_log_likelihood(const VectorXd& theta, const Demonstration& demo, double fd_step,
                             LikelihoodBackend backend, int threads) {
  VectorXd g(theta.size());
  VectorXd probe = theta;
  for (int k = 0; k < theta.size(); ++k) {
    const double h = fd_step * std::max(1.0, std::abs(theta[k]));
    probe[k] = theta[k] + h;
    const double fp = log_likelihood(probe, demo, backend, threads);
    probe[k] = theta[k] - h;
    const double fm = log_likelihood(probe, demo, backend, threads);
    probe[k] = theta[k];
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

InferenceResult infer(const Demonstration& demo, const InferenceConfig& cfg) {
  cfg.validate();
  demo.validate();
  const auto project = [&](VectorXd v) {
    if (cfg.project_nonnegative) v = v.cwiseMax(0.0);
    return v;
  };

  InferenceResult res;
  VectorXd theta = project(cfg.theta0);
  double f = log_likelihood(theta, demo, cfg.backend, cfg.threads);
  if (!std::isfinite(f)) throw NonFiniteObjective(0);
  res.trace.push_back({0, f, theta, 1.0});

  int stagnant = 0;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    res.iterations = iter;
    const VectorXd g =
        grad_log_likelihood(theta, demo, cfg.fd_step, cfg.backend, cfg.threads);
    if (g.cwiseAbs().maxCoeff() < cfg.grad_tol) {
      res.converged = true;
      break;
    }

    double step = cfg.learning_rate;
    bool accepted = false;
    VectorXd cand;
    double fc = f;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
      cand = project(theta + step * g);
      fc = log_likelihood(cand, demo, cfg.backend, cfg.threads);
      if (std::isfinite(fc) && fc >= f) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!std::isfinite(fc)) throw NonFiniteObjective(iter);
      res.converged = true;  // stagnation: no ascent direction at this scale
      break;
    }

    const double delta = fc - f;
    theta = cand;
    f = fc;
    res.trace.push_back({iter, f, theta, step / cfg.learning_rate});
    stagnant = (std::abs(delta) < cfg.stagnation_tol) ? stagnant + 1 : 0;
    if (stagnant >= cfg.stagnation_window) {
      res.converged = true;
      break;
    }
  }

  res.theta = theta;
  res.objective = f;
  return res;
}

}  // namespace trajgame

#include "trajgame/cli/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "trajgame/baseline/soft_vi.hpp"
#include "trajgame/cli/manifest.hpp"
#include "trajgame/core/expansion.hpp"
#include "trajgame/inference/inference.hpp"
#include "trajgame/io/csv.hpp"
#include "trajgame/io/json_util.hpp"
#include "trajgame/io/svg_plot.hpp"
#include "trajgame/rollout/rollout.hpp"
#include "trajgame/scenario/scenario.hpp"
#include "trajgame/solver/iterative.hpp"
#include "trajgame/solver/value_recursion.hpp"

namespace trajgame {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using clock_type = std::chrono::steady_clock;

uint64_t resolve_seed(const std::optional<uint64_t>& flag, uint64_t scenario_default) {
  if (flag) return *flag;
  if (const char* env = std::getenv("GSCIOC_SEED")) return std::strtoull(env, nullptr, 10);
  return scenario_default;
}

std::string join_args(int argc, const char* const* argv) {
  std::string s;
  for (int k = 0; k < argc; ++k) {
    if (k) s += ' ';
    s += argv[k];
  }
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write: " + path.string());
  out << text;
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Policy file format
// ---------------------------------------------------------------------------

ordered_json reference_json(const JointTrajectory& ref) {
  ordered_json j;
  auto states_i = ordered_json::array(), states_j = ordered_json::array();
  for (const auto& s : ref.states) {
    states_i.push_back(to_json(s.x_i));
    states_j.push_back(to_json(s.x_j));
  }
  auto act_i = ordered_json::array(), act_j = ordered_json::array();
  for (const auto& u : ref.actions_i) act_i.push_back(to_json(u));
  for (const auto& u : ref.actions_j) act_j.push_back(to_json(u));
  j["states_i"] = states_i;
  j["states_j"] = states_j;
  j["actions_i"] = act_i;
  j["actions_j"] = act_j;
  return j;
}

JointTrajectory reference_from_json(const ordered_json& j) {
  JointTrajectory ref;
  const auto& si = j.at("states_i");
  const auto& sj = j.at("states_j");
  for (size_t t = 0; t < si.size(); ++t)
    ref.states.emplace_back(vector_from_json(si[t]), vector_from_json(sj[t]));
  for (const auto& u : j.at("actions_i")) ref.actions_i.push_back(vector_from_json(u));
  for (const auto& u : j.at("actions_j")) ref.actions_j.push_back(vector_from_json(u));
  ref.check_consistent();
  return ref;
}

ordered_json agent_policy_json(const PolicySequence& p) {
  ordered_json ja;
  ja["agent"] = agent_name(p.owner);
  auto stages = ordered_json::array();
  for (int t = 1; t <= p.horizon(); ++t) {
    const StagePolicy& st = p.at(t);
    ordered_json js;
    js["t"] = t;
    js["nu"] = to_json(st.nu);
    js["Pi"] = to_json(st.Pi);
    js["Omega"] = to_json(st.Omega);
    js["precision"] = to_json(st.precision);
    js["covariance"] = to_json(st.covariance);
    stages.push_back(js);
  }
  ja["stages"] = stages;
  return ja;
}

ordered_json policies_json(const std::string& solver, const PolicySequence& pi,
                           const PolicySequence& pj) {
  ordered_json j;
  j["schema_version"] = 1;
  j["solver"] = solver;
  j["agents"] = ordered_json::array({agent_policy_json(pi), agent_policy_json(pj)});
  j["reference"] = reference_json(*pi.reference);
  return j;
}

ordered_json policies_json(const std::string& solver, const JointPolicySequence& p) {
  ordered_json j;
  j["schema_version"] = 1;
  j["solver"] = solver;
  ordered_json ja;
  ja["agent"] = "joint";
  ja["action_dim_i"] = p.action_dim_i;
  auto stages = ordered_json::array();
  for (int t = 1; t <= p.horizon(); ++t) {
    const JointStagePolicy& st = p.at(t);
    ordered_json js;
    js["t"] = t;
    js["nu"] = to_json(st.nu);
    js["K_i"] = to_json(st.K_i);
    js["K_j"] = to_json(st.K_j);
    js["precision"] = to_json(st.precision);
    js["covariance"] = to_json(st.covariance);
    stages.push_back(js);
  }
  ja["stages"] = stages;
  j["agents"] = ordered_json::array({ja});
  j["reference"] = reference_json(*p.reference);
  return j;
}

AgentId parse_agent_tag(const std::string& s) {
  if (s == "i") return AgentId::I;
  if (s == "j") return AgentId::J;
  throw SchemaError("agent tag must be i or j");
}

struct LoadedPolicies {
  std::optional<std::pair<PolicySequence, PolicySequence>> pair;
  std::optional<JointPolicySequence> joint;
  std::string solver;
};

LoadedPolicies policies_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open policy file: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("cannot parse policy JSON: ") + e.what());
  }
  LoadedPolicies out;
  try {
    out.solver = j.at("solver").get<std::string>();
    auto ref = std::make_shared<const JointTrajectory>(reference_from_json(j.at("reference")));
    const auto& agents = j.at("agents");
    if (agents.size() == 1 && agents[0].at("agent") == "joint") {
      JointPolicySequence p;
      p.reference = ref;
      p.action_dim_i = agents[0].at("action_dim_i").get<int>();
      for (const auto& js : agents[0].at("stages")) {
        JointStagePolicy st;
        st.nu = vector_from_json(js.at("nu"));
        st.K_i = matrix_from_json(js.at("K_i"));
        st.K_j = matrix_from_json(js.at("K_j"));
        st.precision = matrix_from_json(js.at("precision"));
        st.covariance = matrix_from_json(js.at("covariance"));
        p.stages.push_back(std::move(st));
      }
      out.joint = std::move(p);
    } else if (agents.size() == 2) {
      std::pair<PolicySequence, PolicySequence> pq;
      PolicySequence* seqs[2] = {&pq.first, &pq.second};
      for (int k = 0; k < 2; ++k) {
        seqs[k]->owner = parse_agent_tag(agents[k].at("agent").get<std::string>());
        seqs[k]->reference = ref;
        for (const auto& js : agents[k].at("stages")) {
          StagePolicy st;
          st.nu = vector_from_json(js.at("nu"));
          st.Pi = matrix_from_json(js.at("Pi"));
          st.Omega = matrix_from_json(js.at("Omega"));
          st.precision = matrix_from_json(js.at("precision"));
          st.covariance = matrix_from_json(js.at("covariance"));
          seqs[k]->stages.push_back(std::move(st));
        }
      }
      out.pair = std::move(pq);
    } else {
      throw SchemaError("policy file must contain two agent policies or one joint policy");
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed policy JSON: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solver dispatch
// ---------------------------------------------------------------------------

struct SolveOutput {
  std::optional<std::pair<PolicySequence, PolicySequence>> pair;
  std::optional<JointPolicySequence> joint;
  int iterations = 0;
  bool converged = true;
  double final_delta = 0.0;
};

SolveOutput run_solver(const BuiltScenario& built, const std::string& solver,
                       const IterationConfig& itcfg) {
  const int m_i = static_cast<int>(built.x0.x_i.size());
  const int m_j = static_cast<int>(built.x0.x_j.size());
  const JointTrajectory standstill = standstill_trajectory(built.x0, built.T, m_i, m_j);
  auto ref = std::make_shared<const JointTrajectory>(standstill);

  SolveOutput out;
  if (solver == "gs-cioc") {
    const auto exp_i = taylor_expand(built.reward_i, ref);
    const auto exp_j = taylor_expand(built.reward_j, ref);
    const auto lin = linearize(*built.dynamics, *ref);
    auto bw = gs_cioc_backward(exp_i, exp_j, lin);
    out.pair = {std::move(bw.policy_i), std::move(bw.policy_j)};
  } else if (solver == "m-cioc") {
    const auto exp = taylor_expand(built.reward_i, ref);
    const auto lin = linearize(*built.dynamics, *ref);
    out.joint = m_cioc_backward(exp, lin);
  } else if (solver == "single-agent") {
    const auto exp_i = taylor_expand(built.reward_i, ref);
    const auto exp_j = taylor_expand(built.reward_j, ref);
    const auto lin = linearize(*built.dynamics, *ref);
    out.pair = {single_agent_cioc_backward(exp_i, lin), single_agent_cioc_backward(exp_j, lin)};
  } else if (solver == "iterative") {
    auto res = iterative_gs_cioc(built.reward_i, built.reward_j, *built.dynamics, standstill,
                                 itcfg);
    out.iterations = res.iterations;
    out.converged = res.converged;
    out.final_delta = res.log.empty() ? 0.0 : res.log.back().trajectory_delta;
    out.pair = {std::move(res.policy_i), std::move(res.policy_j)};
  } else {
    throw SchemaError("unknown solver: " + solver +
                      " (expected gs-cioc, m-cioc, iterative or single-agent)");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics JSON
// ---------------------------------------------------------------------------

ordered_json stats_json(const BatchStatistics& st, uint64_t seed, PolicyProvenance prov) {
  ordered_json j;
  j["schema_version"] = 1;
  j["provenance"] = provenance_name(prov);
  j["seed"] = seed;
  j["n"] = st.n;
  if (st.correlation)
    j["correlation"] = *st.correlation;
  else
    j["correlation"] = nullptr;
  j["total_action_variance"] = st.total_action_variance;
  auto per_t = ordered_json::array();
  for (double c : st.per_timestep_correlation)
    per_t.push_back(std::isnan(c) ? ordered_json(nullptr) : ordered_json(c));
  j["per_timestep_correlation"] = per_t;
  auto arr = [](const std::vector<VectorXd>& vs) {
    auto a = ordered_json::array();
    for (const auto& v : vs) a.push_back(to_json(v));
    return a;
  };
  j["std_actions_i"] = arr(st.std_actions_i);
  j["std_actions_j"] = arr(st.std_actions_j);
  j["std_states_i"] = arr(st.std_states_i);
  j["std_states_j"] = arr(st.std_states_j);
  j["mean"] = reference_json(st.mean_trajectory);
  return j;
}

// ---------------------------------------------------------------------------
// Subcommand options
// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string scenario_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  int threads = 0;
};

struct SolveOpts : CommonOpts {
  std::string solver = "gs-cioc";
  std::vector<double> theta;
  double eta = 0.5;
  int max_iterations = 100;
  double tol = 1e-6;
};

struct RolloutOpts : SolveOpts {
  std::string policy_file;
  int n = -1;
};

struct InferOpts : CommonOpts {
  std::string data_csv;
  std::vector<double> theta0;
  double lr = 1e-3;
  int max_iterations = 50000;
  double grad_tol = 1e-6;
  double fd_step = 1e-5;
  std::string backend = "gs-cioc";
};

struct ViOpts : CommonOpts {
  int state_bins = 121;
  int action_bins = 41;
  std::string state_range_i = "-8:8", state_range_j = "-8:8";
  std::string action_range_i = "-2:2", action_range_j = "-2:2";
  double sweep_tol = 1e-6;
  int max_sweeps = 50;
  int n = 500;
  double eta = 0.5;
  int solver_iterations = 100;
};

struct PlotOpts {
  std::vector<std::string> data;
  std::string field = "state";
  int dim = 0;
  std::string out_file;
};

struct StatsOpts : CommonOpts {
  std::string data_csv;
};

struct ReproduceOpts : CommonOpts {
  bool fast = false;
};

std::pair<double, double> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw SchemaError("range must look like lo:hi, got " + s);
  try {
    size_t used = 0;
    const double lo = std::stod(s.substr(0, colon), &used);
    if (used != colon) throw SchemaError("bad range: " + s);
    const std::string rest = s.substr(colon + 1);
    const double hi = std::stod(rest, &used);
    if (used != rest.size()) throw SchemaError("bad range: " + s);
    if (!(hi > lo)) throw SchemaError("range hi must exceed lo: " + s);
    return {lo, hi};
  } catch (const std::invalid_argument&) {
    throw SchemaError("bad range: " + s);
  } catch (const std::out_of_range&) {
    throw SchemaError("bad range: " + s);
  }
}

BuiltScenario load_and_build(const std::string& path, const std::vector<double>& theta_override) {
  ScenarioConfig cfg = load_scenario(path);
  if (!theta_override.empty()) {
    if (static_cast<int>(theta_override.size()) != cfg.theta.size())
      throw SchemaError("theta override size does not match the scenario's theta");
    for (size_t k = 0; k < theta_override.size(); ++k) cfg.theta[k] = theta_override[k];
  }
  BuiltScenario built = build_scenario(cfg);
  return built;
}

// ---------------------------------------------------------------------------
// Handlers
// ---------------------------------------------------------------------------

int cmd_solve(const SolveOpts& o, const std::string& command) {
  const auto t0 = clock_type::now();
  fs::create_directories(o.out_dir);
  BuiltScenario built = load_and_build(o.scenario_path, o.theta);
  IterationConfig itcfg;
  itcfg.eta = o.eta;
  itcfg.max_iterations = o.max_iterations;
  itcfg.convergence_tol = o.tol;
  SolveOutput so = run_solver(built, o.solver, itcfg);

  ordered_json j = so.joint ? policies_json(o.solver, *so.joint)
                            : policies_json(o.solver, so.pair->first, so.pair->second);
  write_json(fs::path(o.out_dir) / "policies.json", j);

  ordered_json overrides;
  overrides["solver"] = o.solver;
  if (!o.theta.empty()) overrides["theta"] = o.theta;
  if (o.solver == "iterative") {
    overrides["iterations"] = so.iterations;
    overrides["converged"] = so.converged;
    overrides["final_delta"] = so.final_delta;
  }
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest(o.out_dir, command, "solve", o.scenario_path,
                 resolve_seed(o.seed, built.default_seed), overrides, secs);
  std::cout << "wrote " << (fs::path(o.out_dir) / "policies.json").string() << "\n";
  return 0;
}

int cmd_rollout(const RolloutOpts& o, const std::string& command) {
  const auto t0 = clock_type::now();
  fs::create_directories(o.out_dir);
  BuiltScenario built = load_and_build(o.scenario_path, o.theta);
  const uint64_t seed = resolve_seed(o.seed, built.default_seed);
  const int n = o.n > 0 ? o.n : built.default_rollouts;

  RolloutBatch batch;
  if (!o.policy_file.empty()) {
    LoadedPolicies lp = policies_from_file(o.policy_file);
    if (lp.joint)
      batch = sample_rollouts(*lp.joint, *built.dynamics, built.x0, n, seed);
    else
      batch = sample_rollouts(lp.pair->first, lp.pair->second, *built.dynamics, built.x0, n,
                              seed);
  } else {
    IterationConfig itcfg;
    itcfg.eta = o.eta;
    itcfg.max_iterations = o.max_iterations;
    itcfg.convergence_tol = o.tol;
    SolveOutput so = run_solver(built, o.solver, itcfg);
    if (so.joint)
      batch = sample_rollouts(*so.joint, *built.dynamics, built.x0, n, seed);
    else
      batch = sample_rollouts(so.pair->first, so.pair->second, *built.dynamics, built.x0, n,
                              seed);
    if (o.solver == "iterative") batch.provenance = PolicyProvenance::Iterative;
  }

  write_batch_csv((fs::path(o.out_dir) / "batch.csv").string(), batch);
  if (n >= 2) {
    write_json(fs::path(o.out_dir) / "stats.json",
               stats_json(batch_statistics(batch), seed, batch.provenance));
  } else {
    ordered_json note;
    note["schema_version"] = 1;
    note["note"] = "InsufficientSamples: statistics need at least 2 trajectories";
    note["n"] = n;
    write_json(fs::path(o.out_dir) / "stats.json", note);
  }

  ordered_json overrides;
  overrides["n"] = n;
  overrides["solver"] = o.solver;
  if (!o.policy_file.empty()) overrides["policy"] = o.policy_file;
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest(o.out_dir, command, "rollout", o.scenario_path, seed, overrides, secs);
  std::cout << "wrote " << (fs::path(o.out_dir) / "batch.csv").string() << " (" << n
            << " trajectories)\n";
  return 0;
}

int cmd_infer(const InferOpts& o, const std::string& command) {
  const auto t0 = clock_type::now();
  fs::create_directories(o.out_dir);
  BuiltScenario built = load_and_build(o.scenario_path, {});
  const uint64_t seed = resolve_seed(o.seed, built.default_seed);

  Demonstration demo;
  demo.dynamics = built.dynamics;
  demo.reward_i = built.reward_i;
  demo.reward_j = built.reward_j;
  demo.trajectories = read_batch_csv(o.data_csv, static_cast<int>(built.x0.x_i.size()),
                                     static_cast<int>(built.x0.x_j.size()),
                                     static_cast<int>(built.x0.x_i.size()),
                                     static_cast<int>(built.x0.x_j.size()));

  InferenceConfig cfg;
  cfg.theta0 = o.theta0.empty()
                   ? VectorXd::Ones(built.theta.size())
                   : Eigen::Map<const VectorXd>(o.theta0.data(), o.theta0.size()).eval();
  cfg.learning_rate = o.lr;
  cfg.max_iterations = o.max_iterations;
  cfg.grad_tol = o.grad_tol;
  cfg.fd_step = o.fd_step;
  cfg.threads = o.threads;
  if (o.backend == "gs-cioc")
    cfg.backend = LikelihoodBackend::GsCioc;
  else if (o.backend == "single-agent-i")
    cfg.backend = LikelihoodBackend::SingleAgentI;
  else if (o.backend == "single-agent-j")
    cfg.backend = LikelihoodBackend::SingleAgentJ;
  else
    throw SchemaError("unknown backend: " + o.backend);

  InferenceResult res = infer(demo, cfg);

  ordered_json j;
  j["schema_version"] = 1;
  j["theta"] = to_json(res.theta);
  j["objective"] = res.objective;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["seed"] = seed;
  auto obj_trace = ordered_json::array();
  for (const auto& tp : res.trace) obj_trace.push_back(tp.objective);
  j["objective_trace"] = obj_trace;
  write_json(fs::path(o.out_dir) / "theta.json", j);

  std::ofstream trace((fs::path(o.out_dir) / "trace.csv").string());
  trace << "iteration,objective,step_scale";
  for (int k = 0; k < res.theta.size(); ++k) trace << ",theta" << k;
  trace << "\n";
  for (const auto& tp : res.trace) {
    trace << tp.iteration << ',' << format_double(tp.objective) << ','
          << format_double(tp.step_scale);
    for (int k = 0; k < tp.theta.size(); ++k) trace << ',' << format_double(tp.theta[k]);
    trace << "\n";
  }

  ordered_json overrides;
  overrides["data"] = o.data_csv;
  overrides["theta0"] = to_json(cfg.theta0);
  overrides["learning_rate"] = o.lr;
  overrides["backend"] = o.backend;
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest(o.out_dir, command, "infer", o.scenario_path, seed, overrides, secs);
  std::cout << "theta = " << res.theta.transpose() << "  (objective " << res.objective << ", "
            << res.iterations << " iterations)\n";
  return 0;
}

int cmd_baseline_vi(const ViOpts& o, const std::string& command) {
  const auto t0 = clock_type::now();
  fs::create_directories(o.out_dir);
  BuiltScenario built = load_and_build(o.scenario_path, {});
  const uint64_t seed = resolve_seed(o.seed, built.default_seed);

  GridSpec grid;
  auto fill_axes = [&](std::vector<GridAxis>& axes, int dims, const std::string& range,
                       int bins) {
    const auto [lo, hi] = parse_range(range);
    axes.assign(dims, GridAxis{lo, hi, bins});
  };
  fill_axes(grid.state_i, static_cast<int>(built.x0.x_i.size()), o.state_range_i, o.state_bins);
  fill_axes(grid.state_j, static_cast<int>(built.x0.x_j.size()), o.state_range_j, o.state_bins);
  fill_axes(grid.action_i, built.dynamics->action_dim(AgentId::I), o.action_range_i,
            o.action_bins);
  fill_axes(grid.action_j, built.dynamics->action_dim(AgentId::J), o.action_range_j,
            o.action_bins);

  auto [pol_i, pol_j] =
      soft_vi_solve(built.reward_i, built.reward_j, *built.dynamics, grid, built.T, o.sweep_tol,
                    o.max_sweeps);

  // policy dumps
  for (const TabularPolicy* pol : {&pol_i, &pol_j}) {
    const AxisGrid actions(pol->owner == AgentId::I ? grid.action_i : grid.action_j);
    std::ofstream out((fs::path(o.out_dir) /
                       (std::string("vi_policy_") + agent_name(pol->owner) + ".csv"))
                          .string());
    out << "t,state_index,action_index,action_value0,prob\n";
    for (int t = 1; t <= pol->horizon(); ++t) {
      const MatrixXd& probs = pol->probs[t - 1];
      for (int s = 0; s < probs.rows(); ++s)
        for (int a = 0; a < probs.cols(); ++a)
          out << t << ',' << s << ',' << a << ',' << format_double(actions.value(a)[0]) << ','
              << format_double(probs(s, a)) << "\n";
    }
  }

  // mean curves: tabular roll-outs vs iterative GS-CIOC deterministic means
  RolloutBatch vi_batch =
      tabular_rollout(pol_i, pol_j, *built.dynamics, built.x0, o.n, seed);
  BatchStatistics vi_stats = batch_statistics(vi_batch);
  IterationConfig itcfg;
  itcfg.eta = o.eta;
  itcfg.max_iterations = o.solver_iterations;
  auto it_res = iterative_gs_cioc(
      built.reward_i, built.reward_j, *built.dynamics,
      standstill_trajectory(built.x0, built.T, built.dynamics->action_dim(AgentId::I),
                            built.dynamics->action_dim(AgentId::J)),
      itcfg);
  JointTrajectory gs_mean =
      rollout_mean(it_res.policy_i, it_res.policy_j, *built.dynamics, built.x0);

  std::ofstream cmp((fs::path(o.out_dir) / "comparison.csv").string());
  cmp << "t";
  for (int d = 0; d < built.x0.x_i.size(); ++d) cmp << ",vi_mean_i" << d << ",gs_mean_i" << d;
  for (int d = 0; d < built.x0.x_j.size(); ++d) cmp << ",vi_mean_j" << d << ",gs_mean_j" << d;
  cmp << "\n";
  for (int t = 0; t <= built.T; ++t) {
    cmp << t;
    for (int d = 0; d < built.x0.x_i.size(); ++d)
      cmp << ',' << format_double(vi_stats.mean_trajectory.states[t].x_i[d]) << ','
          << format_double(gs_mean.states[t].x_i[d]);
    for (int d = 0; d < built.x0.x_j.size(); ++d)
      cmp << ',' << format_double(vi_stats.mean_trajectory.states[t].x_j[d]) << ','
          << format_double(gs_mean.states[t].x_j[d]);
    cmp << "\n";
  }

  ordered_json overrides;
  overrides["state_bins"] = o.state_bins;
  overrides["action_bins"] = o.action_bins;
  overrides["n"] = o.n;
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest(o.out_dir, command, "baseline-vi", o.scenario_path, seed, overrides, secs);
  std::cout << "wrote " << (fs::path(o.out_dir) / "comparison.csv").string() << "\n";
  return 0;
}

int cmd_stats(const StatsOpts& o, const std::string& command) {
  const auto t0 = clock_type::now();
  fs::create_directories(o.out_dir);
  BuiltScenario built = load_and_build(o.scenario_path, {});
  RolloutBatch batch;
  batch.trajectories = read_batch_csv(o.data_csv, static_cast<int>(built.x0.x_i.size()),
                                      static_cast<int>(built.x0.x_j.size()),
                                      static_cast<int>(built.x0.x_i.size()),
                                      static_cast<int>(built.x0.x_j.size()));
  const uint64_t seed = resolve_seed(o.seed, built.default_seed);
  write_json(fs::path(o.out_dir) / "stats.json",
             stats_json(batch_statistics(batch), seed, PolicyProvenance::GsCioc));
  ordered_json overrides;
  overrides["data"] = o.data_csv;
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest(o.out_dir, command, "stats", o.scenario_path, seed, overrides, secs);
  return 0;
}

int cmd_plot(const PlotOpts& o) {
  if (o.data.empty()) throw SchemaError("plot needs at least one --data CSV");
  const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::vector<PlotSeries> series;
  int color = 0;
  for (const auto& file : o.data) {
    std::ifstream in(file);
    if (!in) throw SchemaError("cannot open CSV: " + file);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty CSV: " + file);
    // map (agent, t) -> values of the requested column
    std::map<std::string, std::map<int, std::vector<double>>> cells;
    int K = 0, L = 0;
    {
      std::stringstream hs(line);
      std::string cell;
      int idx = 0;
      while (std::getline(hs, cell, ',')) {
        if (cell.rfind('x', 0) == 0) ++K;
        if (cell.rfind('u', 0) == 0) ++L;
        ++idx;
      }
    }
    const int col = o.field == "action" ? 3 + K + o.dim : 3 + o.dim;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ls(line);
      std::string cell;
      std::vector<std::string> cs;
      while (std::getline(ls, cell, ',')) cs.push_back(cell);
      if (line.back() == ',') cs.push_back("");
      if (static_cast<int>(cs.size()) <= col) continue;
      if (cs[col].empty()) continue;
      cells[cs[2]][std::stoi(cs[1])].push_back(std::stod(cs[col]));
    }
    if (cells.empty()) throw SchemaError("no plottable rows in " + file);
    for (const auto& [agent, by_t] : cells) {
      PlotSeries s;
      s.label = fs::path(file).stem().string() + ":" + agent;
      s.color = palette[color++ % 6];
      for (const auto& [t, vals] : by_t) {
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= vals.size();
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var /= vals.size();
        s.x.push_back(t);
        s.mean.push_back(mean);
        s.band.push_back(std::sqrt(var));
      }
      series.push_back(std::move(s));
    }
  }
  const std::string svg = render_svg_plot(
      o.field + std::to_string(o.dim) + " over time", "t", o.field + std::to_string(o.dim),
      series);
  write_text(o.out_file, svg);
  std::cout << "wrote " << o.out_file << "\n";
  return 0;
}

int cmd_reproduce(const ReproduceOpts& o, const std::string& command);

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"general-sum two-agent maximum-entropy trajectory games: solvers, roll-outs, "
               "reward inference and baselines"};
  app.require_subcommand(1);
  const std::string command = join_args(argc, argv);

  SolveOpts so;
  auto* solve = app.add_subcommand("solve", "compute stage policies for a scenario");
  solve->add_option("--scenario", so.scenario_path, "scenario JSON")->required();
  solve->add_option("--solver", so.solver, "gs-cioc | m-cioc | iterative | single-agent");
  solve->add_option("--out", so.out_dir, "output directory")->required();
  solve->add_option("--theta", so.theta, "override the scenario theta");
  solve->add_option("--eta", so.eta, "iterative: mean scaling");
  solve->add_option("--max-iterations", so.max_iterations, "iterative: iteration cap");
  solve->add_option("--tol", so.tol, "iterative: convergence tolerance");
  solve->add_option("--seed", so.seed, "seed recorded in the manifest");
  solve->add_option("--threads", so.threads, "worker cap");

  RolloutOpts ro;
  auto* rollout = app.add_subcommand("rollout", "sample stochastic roll-outs and statistics");
  rollout->add_option("--scenario", ro.scenario_path, "scenario JSON")->required();
  rollout->add_option("--policy", ro.policy_file, "policies.json from solve");
  rollout->add_option("--solver", ro.solver, "solver when no policy file is given");
  rollout->add_option("-n,--n", ro.n, "number of roll-outs (default: scenario)");
  rollout->add_option("--seed", ro.seed, "RNG seed (or GSCIOC_SEED)");
  rollout->add_option("--out", ro.out_dir, "output directory")->required();
  rollout->add_option("--theta", ro.theta, "override the scenario theta");
  rollout->add_option("--eta", ro.eta, "iterative: mean scaling");
  rollout->add_option("--max-iterations", ro.max_iterations, "iterative: iteration cap");
  rollout->add_option("--threads", ro.threads, "worker cap");

  InferOpts io_;
  auto* infer_cmd = app.add_subcommand("infer", "maximum-likelihood reward parameters");
  infer_cmd->add_option("--scenario", io_.scenario_path, "scenario JSON with theta slots")
      ->required();
  infer_cmd->add_option("--data", io_.data_csv, "demonstration batch CSV")->required();
  infer_cmd->add_option("--out", io_.out_dir, "output directory")->required();
  infer_cmd->add_option("--theta0", io_.theta0, "initial parameters (default: ones)");
  infer_cmd->add_option("--lr", io_.lr, "learning rate");
  infer_cmd->add_option("--max-iterations", io_.max_iterations, "iteration cap");
  infer_cmd->add_option("--grad-tol", io_.grad_tol, "gradient stop");
  infer_cmd->add_option("--fd-step", io_.fd_step, "finite-difference step");
  infer_cmd->add_option("--backend", io_.backend,
                        "gs-cioc | single-agent-i | single-agent-j");
  infer_cmd->add_option("--seed", io_.seed, "seed recorded in the manifest");
  infer_cmd->add_option("--threads", io_.threads, "worker cap");

  ViOpts vo;
  auto* vi = app.add_subcommand("baseline-vi", "discretized soft value iteration baseline");
  vi->add_option("--scenario", vo.scenario_path, "scenario JSON")->required();
  vi->add_option("--out", vo.out_dir, "output directory")->required();
  vi->add_option("--state-bins", vo.state_bins, "state bins per dimension");
  vi->add_option("--action-bins", vo.action_bins, "action bins per dimension");
  vi->add_option("--state-range-i", vo.state_range_i, "lo:hi");
  vi->add_option("--state-range-j", vo.state_range_j, "lo:hi");
  vi->add_option("--action-range-i", vo.action_range_i, "lo:hi");
  vi->add_option("--action-range-j", vo.action_range_j, "lo:hi");
  vi->add_option("--sweep-tol", vo.sweep_tol, "policy convergence tolerance");
  vi->add_option("--max-sweeps", vo.max_sweeps, "sweep cap");
  vi->add_option("-n,--n", vo.n, "tabular roll-outs for the comparison");
  vi->add_option("--seed", vo.seed, "RNG seed");

  StatsOpts sto;
  auto* stats = app.add_subcommand("stats", "statistics of an existing batch CSV");
  stats->add_option("--scenario", sto.scenario_path, "scenario JSON")->required();
  stats->add_option("--data", sto.data_csv, "batch CSV")->required();
  stats->add_option("--out", sto.out_dir, "output directory")->required();
  stats->add_option("--seed", sto.seed, "seed recorded in the manifest");

  PlotOpts po;
  auto* plot = app.add_subcommand("plot", "SVG mean curves with +-1 sigma bands");
  plot->add_option("--data", po.data, "batch CSV (repeatable)")->required();
  plot->add_option("--field", po.field, "state | action");
  plot->add_option("--dim", po.dim, "component index");
  plot->add_option("--out", po.out_file, "output SVG file")->required();

  ReproduceOpts rp;
  auto* rep = app.add_subcommand("reproduce", "run the full experiment pipeline");
  rep->add_option("--out", rp.out_dir, "output directory")->required();
  rep->add_flag("--fast", rp.fast, "smaller sample counts for a quick pass");
  rep->add_option("--seed", rp.seed, "RNG seed");
  rep->add_option("--threads", rp.threads, "worker cap");

  try {
    app.parse(argc, argv);
    if (*solve) return cmd_solve(so, command);
    if (*rollout) return cmd_rollout(ro, command);
    if (*infer_cmd) return cmd_infer(io_, command);
    if (*vi) return cmd_baseline_vi(vo, command);
    if (*stats) return cmd_stats(sto, command);
    if (*plot) return cmd_plot(po);
    if (*rep) return cmd_reproduce(rp, command);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

namespace {

// Full experiment pipeline: cooperative and heterogeneous group-goal games
// (roll-outs, statistics, inference, single-agent baseline inference) and the
// two zebra variants under the iterative solver.
int cmd_reproduce(const ReproduceOpts& o, const std::string& command) {
  const auto t0 = clock_type::now();
  fs::create_directories(o.out_dir);
  const uint64_t seed = resolve_seed(o.seed, 2024);
  const int n = o.fast ? 300 : 2000;
  ordered_json summary;
  summary["seed"] = seed;
  summary["n"] = n;

  const Eigen::Vector3d alpha(0.2, 1.0, 3.0);
  const Eigen::Vector3d alpha_het(0.4, 1.5, 2.5);

  // cooperative game: GS-CIOC vs M-CIOC
  BuiltScenario coop = build_scenario(build_group_goal_scenario(alpha, alpha));
  save_scenario(build_group_goal_scenario(alpha, alpha),
                (fs::path(o.out_dir) / "group_goal_cooperative.json").string());
  SolveOutput gs = run_solver(coop, "gs-cioc", {});
  SolveOutput mc = run_solver(coop, "m-cioc", {});
  RolloutBatch gs_batch =
      sample_rollouts(gs.pair->first, gs.pair->second, *coop.dynamics, coop.x0, n, seed);
  RolloutBatch mc_batch = sample_rollouts(*mc.joint, *coop.dynamics, coop.x0, n, seed + 1);
  write_batch_csv((fs::path(o.out_dir) / "gs_batch.csv").string(), gs_batch);
  write_batch_csv((fs::path(o.out_dir) / "mc_batch.csv").string(), mc_batch);
  BatchStatistics gs_stats = batch_statistics(gs_batch);
  BatchStatistics mc_stats = batch_statistics(mc_batch);
  summary["gs_correlation"] = gs_stats.correlation ? ordered_json(*gs_stats.correlation)
                                                   : ordered_json(nullptr);
  summary["mc_correlation"] = mc_stats.correlation ? ordered_json(*mc_stats.correlation)
                                                   : ordered_json(nullptr);
  summary["variance_ratio_mc_over_gs"] = variance_ratio(mc_stats, gs_stats);

  auto run_inference = [&](const BuiltScenario& built, const RolloutBatch& batch,
                           LikelihoodBackend backend) {
    Demonstration demo;
    demo.dynamics = built.dynamics;
    demo.reward_i = built.reward_i;
    demo.reward_j = built.reward_j;
    demo.trajectories = batch.trajectories;
    InferenceConfig cfg;
    cfg.theta0 = VectorXd::Ones(built.theta.size());
    cfg.threads = o.threads;
    cfg.backend = backend;
    if (o.fast) cfg.max_iterations = 4000;
    return infer(demo, cfg);
  };

  InferenceResult inf_gs = run_inference(coop, gs_batch, LikelihoodBackend::GsCioc);
  summary["theta_from_gs_data"] = to_json(inf_gs.theta);
  InferenceResult inf_mc = run_inference(coop, mc_batch, LikelihoodBackend::GsCioc);
  summary["theta_from_mc_data"] = to_json(inf_mc.theta);

  // heterogeneous game
  BuiltScenario het = build_scenario(build_group_goal_scenario(alpha_het, alpha));
  SolveOutput gs_het = run_solver(het, "gs-cioc", {});
  RolloutBatch het_batch = sample_rollouts(gs_het.pair->first, gs_het.pair->second,
                                           *het.dynamics, het.x0, n, seed + 2);
  InferenceResult inf_het = run_inference(het, het_batch, LikelihoodBackend::GsCioc);
  summary["theta_heterogeneous"] = to_json(inf_het.theta);
  InferenceResult inf_sa_i = run_inference(het, het_batch, LikelihoodBackend::SingleAgentI);
  InferenceResult inf_sa_j = run_inference(het, het_batch, LikelihoodBackend::SingleAgentJ);
  summary["theta_single_agent_i"] = to_json(VectorXd(inf_sa_i.theta.head(3)));
  summary["theta_single_agent_j"] = to_json(VectorXd(inf_sa_j.theta.tail(3)));

  // zebra variants
  for (bool social : {false, true}) {
    BuiltScenario zebra =
        build_scenario(build_zebra_scenario(social, zebra_default_coefficients()));
    IterationConfig itcfg;
    auto res = iterative_gs_cioc(
        zebra.reward_i, zebra.reward_j, *zebra.dynamics,
        standstill_trajectory(zebra.x0, zebra.T, 1, 1), itcfg);
    RolloutBatch zb = sample_rollouts(res.policy_i, res.policy_j, *zebra.dynamics, zebra.x0,
                                      std::max(100, n / 4), seed + (social ? 4 : 3));
    zb.provenance = PolicyProvenance::Iterative;
    const std::string tag = social ? "zebra_social" : "zebra_asocial";
    write_batch_csv((fs::path(o.out_dir) / (tag + ".csv")).string(), zb);
    summary[tag + "_iterations"] = res.iterations;
    ordered_json mean_ped = ordered_json::array();
    for (int t = 0; t <= zebra.T; ++t)
      mean_ped.push_back(batch_statistics(zb).mean_trajectory.states[t].x_i[0]);
    summary[tag + "_ped_mean"] = mean_ped;
  }

  write_json(fs::path(o.out_dir) / "summary.json", summary);
  ordered_json overrides;
  overrides["fast"] = o.fast;
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest(o.out_dir, command, "reproduce", "", seed, overrides, secs);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

}  // namespace trajgame

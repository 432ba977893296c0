#include "trajgame/scenario/scenario.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace trajgame {

using ordered_json = nlohmann::ordered_json;

void ScenarioConfig::validate() const {
  if (schema_version != 1) throw SchemaError("unsupported schema_version");
  if (T < 1) throw SchemaError("T must be >= 1");
  if (agent_i.state_dim < 1 || agent_j.state_dim < 1 || agent_i.action_dim < 1 ||
      agent_j.action_dim < 1)
    throw SchemaError("agent dimensions must be positive");
  if (x0.x_i.size() != agent_i.state_dim || x0.x_j.size() != agent_j.state_dim)
    throw DimensionMismatch("x0 does not match agent state dimensions");
}

namespace {

AgentId parse_agent(const std::string& s) {
  if (s == "i") return AgentId::I;
  if (s == "j") return AgentId::J;
  throw SchemaError("agent tag must be \"i\" or \"j\"");
}

Coefficient parse_weight(const ordered_json& j) {
  if (j.is_number()) return Coefficient::fixed(j.get<double>());
  if (j.is_object() && j.contains("theta")) return Coefficient::slot(j["theta"].get<int>());
  throw SchemaError("weight must be a number or {\"theta\": index}");
}

ordered_json weight_json(const Coefficient& c) {
  if (c.theta_index >= 0) return ordered_json{{"theta", c.theta_index}};
  return ordered_json(c.value);
}

VectorXd parse_vector(const ordered_json& j) {
  VectorXd v(j.size());
  for (size_t k = 0; k < j.size(); ++k) v[k] = j[k].get<double>();
  return v;
}

ordered_json vector_json(const VectorXd& v) {
  ordered_json j = ordered_json::array();
  for (int k = 0; k < v.size(); ++k) j.push_back(v[k]);
  return j;
}

std::shared_ptr<const RewardTerm> term_from_json(const ordered_json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "quadratic_goal")
    return std::make_shared<QuadraticGoalTerm>(parse_agent(j.at("subject").get<std::string>()),
                                               parse_weight(j.at("weight")),
                                               parse_vector(j.at("target")));
  if (type == "quadratic_lane")
    return std::make_shared<QuadraticLaneTerm>(parse_agent(j.at("subject").get<std::string>()),
                                               parse_weight(j.at("weight")),
                                               j.at("axis").get<int>(),
                                               j.at("center").get<double>());
  if (type == "quadratic_velocity")
    return std::make_shared<QuadraticVelocityTerm>(
        parse_agent(j.at("subject").get<std::string>()), parse_weight(j.at("weight")),
        parse_vector(j.at("target")));
  if (type == "coupled_action")
    return std::make_shared<CoupledActionTerm>(parse_weight(j.at("weight")));
  if (type == "zebra_interaction")
    return std::make_shared<ZebraInteractionTerm>(parse_agent(j.at("car").get<std::string>()),
                                                  parse_agent(j.at("pedestrian").get<std::string>()),
                                                  parse_weight(j.at("weight")));
  throw SchemaError("unknown reward term type: " + type);
}

}  // namespace

ordered_json scenario_to_json(const ScenarioConfig& cfg) {
  ordered_json j;
  j["schema_version"] = cfg.schema_version;
  j["name"] = cfg.name;
  j["agents"] = ordered_json::array();
  for (const auto* a : {&cfg.agent_i, &cfg.agent_j}) {
    ordered_json ja;
    ja["state_dim"] = a->state_dim;
    ja["action_dim"] = a->action_dim;
    ja["reward_terms"] = a->reward_terms;
    j["agents"].push_back(ja);
  }
  j["dynamics"] = ordered_json{{"type", cfg.dynamics_type}, {"params", ordered_json::object()}};
  j["x0"] = ordered_json::array({vector_json(cfg.x0.x_i), vector_json(cfg.x0.x_j)});
  j["T"] = cfg.T;
  j["theta"] = vector_json(cfg.theta);
  j["defaults"] = ordered_json{{"n_rollouts", cfg.default_rollouts}, {"seed", cfg.default_seed}};
  return j;
}

ScenarioConfig scenario_from_json(const ordered_json& j) {
  ScenarioConfig cfg;
  try {
    cfg.schema_version = j.at("schema_version").get<int>();
    cfg.name = j.at("name").get<std::string>();
    const auto& agents = j.at("agents");
    if (agents.size() != 2) throw SchemaError("scenario must declare exactly two agents");
    ScenarioConfig::AgentSpec* specs[2] = {&cfg.agent_i, &cfg.agent_j};
    for (int k = 0; k < 2; ++k) {
      specs[k]->state_dim = agents[k].at("state_dim").get<int>();
      specs[k]->action_dim = agents[k].at("action_dim").get<int>();
      for (const auto& t : agents[k].at("reward_terms")) specs[k]->reward_terms.push_back(t);
    }
    cfg.dynamics_type = j.at("dynamics").at("type").get<std::string>();
    cfg.x0 = JointState(parse_vector(j.at("x0").at(0)), parse_vector(j.at("x0").at(1)));
    cfg.T = j.at("T").get<int>();
    cfg.theta = parse_vector(j.at("theta"));
    if (j.contains("defaults")) {
      cfg.default_rollouts = j["defaults"].value("n_rollouts", 2000);
      cfg.default_seed = j["defaults"].value("seed", uint64_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed scenario JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("cannot parse scenario JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scenario file: " + path);
  out << scenario_to_json(cfg).dump(2) << "\n";
}

BuiltScenario build_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  BuiltScenario built;
  if (cfg.dynamics_type == "integrator") {
    if (cfg.agent_i.action_dim != cfg.agent_i.state_dim ||
        cfg.agent_j.action_dim != cfg.agent_j.state_dim)
      throw SchemaError("integrator dynamics require action_dim == state_dim");
    built.dynamics =
        std::make_shared<IntegratorDynamics>(cfg.agent_i.state_dim, cfg.agent_j.state_dim);
  } else {
    throw SchemaError("unknown dynamics type: " + cfg.dynamics_type);
  }
  built.reward_i.owner = AgentId::I;
  built.reward_j.owner = AgentId::J;
  built.reward_i.theta = cfg.theta;
  built.reward_j.theta = cfg.theta;
  for (const auto& t : cfg.agent_i.reward_terms) built.reward_i.terms.push_back(term_from_json(t));
  for (const auto& t : cfg.agent_j.reward_terms) built.reward_j.terms.push_back(term_from_json(t));
  built.x0 = cfg.x0;
  built.T = cfg.T;
  built.theta = cfg.theta;
  built.default_rollouts = cfg.default_rollouts;
  built.default_seed = cfg.default_seed;
  return built;
}

// ---------------------------------------------------------------------------

namespace {

ordered_json goal_term(const char* subject, ordered_json weight, const VectorXd& target) {
  return ordered_json{
      {"type", "quadratic_goal"}, {"subject", subject}, {"weight", weight},
      {"target", vector_json(target)}};
}

ordered_json velocity_term(const char* subject, ordered_json weight, const VectorXd& target) {
  return ordered_json{
      {"type", "quadratic_velocity"}, {"subject", subject}, {"weight", weight},
      {"target", vector_json(target)}};
}

}  // namespace

ScenarioConfig build_group_goal_scenario(const Eigen::Vector3d& alpha_i,
                                         const Eigen::Vector3d& alpha_j) {
  if (alpha_i.minCoeff() < 0.0 || alpha_j.minCoeff() < 0.0)
    throw NegativeParameter("group-goal reward parameters must be nonnegative");
  const bool shared = alpha_i == alpha_j;

  ScenarioConfig cfg;
  cfg.name = shared ? "group-goal-cooperative" : "group-goal-heterogeneous";
  cfg.agent_i = {2, 2, {}};
  cfg.agent_j = {2, 2, {}};
  cfg.dynamics_type = "integrator";
  cfg.x0 = JointState((VectorXd(2) << 20.0, 20.0).finished(),
                      (VectorXd(2) << 20.0, -20.0).finished());
  cfg.T = 14;
  if (shared) {
    cfg.theta = alpha_i;
  } else {
    cfg.theta.resize(6);
    cfg.theta << alpha_i, alpha_j;
  }

  const VectorXd zero2 = VectorXd::Zero(2);
  auto slot = [](int idx) { return ordered_json{{"theta", idx}}; };
  ScenarioConfig::AgentSpec* specs[2] = {&cfg.agent_i, &cfg.agent_j};
  for (int k = 0; k < 2; ++k) {
    const int base = (shared || k == 0) ? 0 : 3;
    auto& terms = specs[k]->reward_terms;
    terms.push_back(goal_term("i", slot(base + 0), zero2));
    terms.push_back(goal_term("j", slot(base + 0), zero2));
    terms.push_back(velocity_term("i", slot(base + 1), zero2));
    terms.push_back(velocity_term("j", slot(base + 1), zero2));
    terms.push_back(ordered_json{{"type", "coupled_action"}, {"weight", slot(base + 2)}});
  }
  return cfg;
}

std::map<std::string, double> zebra_default_coefficients() {
  // Calibrated so that the iterative solver reproduces the yield-and-cross
  // behavior; not sourced from published values.
  return {{"ped_goal_weight", 0.02},     {"ped_velocity_weight", 1.0},
          {"ped_preferred_speed", 1.0},  {"car_goal_weight", 0.05},
          {"car_velocity_weight", 1.0},  {"car_preferred_speed", -1.5},
          {"interaction_weight", 8.0}};
}

ScenarioConfig build_zebra_scenario(bool social,
                                    const std::map<std::string, double>& coefficients) {
  auto coeff = [&](const std::string& key) {
    auto it = coefficients.find(key);
    if (it == coefficients.end()) throw MissingCoefficient("missing zebra coefficient: " + key);
    return it->second;
  };
  const double ped_goal_w = coeff("ped_goal_weight");
  const double ped_vel_w = coeff("ped_velocity_weight");
  const double ped_speed = coeff("ped_preferred_speed");
  const double car_goal_w = coeff("car_goal_weight");
  const double car_vel_w = coeff("car_velocity_weight");
  const double car_speed = coeff("car_preferred_speed");
  const double interaction_w = coeff("interaction_weight");

  ScenarioConfig cfg;
  cfg.name = social ? "zebra-social" : "zebra-asocial";
  cfg.agent_i = {1, 1, {}};  // pedestrian, crossing axis
  cfg.agent_j = {1, 1, {}};  // car, driving axis
  cfg.dynamics_type = "integrator";
  cfg.x0 = JointState(VectorXd::Constant(1, -6.0), VectorXd::Constant(1, 6.0));
  cfg.T = 12;
  cfg.theta = VectorXd();

  const VectorXd ped_goal = VectorXd::Constant(1, 6.0);
  const VectorXd car_goal = VectorXd::Constant(1, -6.0);

  auto& ped = cfg.agent_i.reward_terms;
  ped.push_back(goal_term("i", ordered_json(ped_goal_w), ped_goal));
  ped.push_back(velocity_term("i", ordered_json(ped_vel_w), VectorXd::Constant(1, ped_speed)));
  if (social) ped.push_back(goal_term("j", ordered_json(car_goal_w), car_goal));

  auto& car = cfg.agent_j.reward_terms;
  car.push_back(goal_term("j", ordered_json(car_goal_w), car_goal));
  car.push_back(velocity_term("j", ordered_json(car_vel_w), VectorXd::Constant(1, car_speed)));
  car.push_back(ordered_json{{"type", "zebra_interaction"},
                             {"car", "j"},
                             {"pedestrian", "i"},
                             {"weight", interaction_w}});
  return cfg;
}

}  // namespace trajgame

#include "trajgame/io/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace trajgame {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void write_row(std::ostream& out, int traj, int t, AgentId k, const VectorXd& x,
               const VectorXd* u, int K, int L) {
  out << traj << ',' << t << ',' << agent_name(k);
  for (int d = 0; d < K; ++d) {
    out << ',';
    if (d < x.size()) out << format_double(x[d]);
  }
  for (int d = 0; d < L; ++d) {
    out << ',';
    if (u && d < u->size()) out << format_double((*u)[d]);
  }
  out << '\n';
}

}  // namespace

void write_batch_csv(std::ostream& out, const RolloutBatch& batch) {
  if (batch.trajectories.empty()) throw InsufficientSamples("empty batch");
  const auto& first = batch.trajectories[0];
  const int K = static_cast<int>(std::max(first.states[0].x_i.size(), first.states[0].x_j.size()));
  const int L = static_cast<int>(std::max(first.actions_i[0].size(), first.actions_j[0].size()));

  out << "traj_id,t,agent";
  for (int d = 0; d < K; ++d) out << ",x" << d;
  for (int d = 0; d < L; ++d) out << ",u" << d;
  out << '\n';

  for (int n = 0; n < batch.size(); ++n) {
    const auto& tr = batch.trajectories[n];
    for (int t = 0; t <= tr.horizon(); ++t) {
      write_row(out, n, t, AgentId::I, tr.states[t].x_i,
                t > 0 ? &tr.actions_i[t - 1] : nullptr, K, L);
      write_row(out, n, t, AgentId::J, tr.states[t].x_j,
                t > 0 ? &tr.actions_j[t - 1] : nullptr, K, L);
    }
  }
}

void write_batch_csv(const std::string& path, const RolloutBatch& batch) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  write_batch_csv(out, batch);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

std::vector<JointTrajectory> read_batch_csv(std::istream& in, int state_dim_i, int state_dim_j,
                                            int action_dim_i, int action_dim_j) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty CSV");
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "traj_id" || header[1] != "t" || header[2] != "agent")
    throw SchemaError("unexpected CSV header");
  int K = 0, L = 0;
  for (size_t c = 3; c < header.size(); ++c) {
    if (header[c].rfind("x", 0) == 0 && L == 0)
      ++K;
    else if (header[c].rfind("u", 0) == 0)
      ++L;
    else
      throw SchemaError("unexpected CSV column: " + header[c]);
  }
  if (K < std::max(state_dim_i, state_dim_j) || L < std::max(action_dim_i, action_dim_j))
    throw DimensionMismatch("CSV columns do not cover the scenario dimensions");

  struct Row {
    VectorXd x;
    VectorXd u;
    bool has_action = false;
  };
  // rows[traj][t][agent]
  std::map<int, std::map<int, std::map<int, Row>>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3 + static_cast<size_t>(K) + static_cast<size_t>(L))
      throw SchemaError("CSV row " + std::to_string(line_no) + " has wrong cell count");
    const int traj = std::stoi(cells[0]);
    const int t = std::stoi(cells[1]);
    const AgentId agent = cells[2] == "i" ? AgentId::I : AgentId::J;
    if (cells[2] != "i" && cells[2] != "j")
      throw SchemaError("CSV row " + std::to_string(line_no) + ": bad agent tag");
    const int n = agent == AgentId::I ? state_dim_i : state_dim_j;
    const int m = agent == AgentId::I ? action_dim_i : action_dim_j;
    Row row;
    row.x.resize(n);
    for (int d = 0; d < n; ++d) {
      if (cells[3 + d].empty())
        throw SchemaError("CSV row " + std::to_string(line_no) + ": missing state cell");
      row.x[d] = std::stod(cells[3 + d]);
    }
    if (t > 0) {
      row.u.resize(m);
      row.has_action = true;
      for (int d = 0; d < m; ++d) {
        if (cells[3 + K + d].empty())
          throw SchemaError("CSV row " + std::to_string(line_no) + ": missing action cell");
        row.u[d] = std::stod(cells[3 + K + d]);
      }
    }
    rows[traj][t][agent_index(agent)] = std::move(row);
  }
  if (rows.empty()) throw SchemaError("CSV contains no data rows");

  std::vector<JointTrajectory> out;
  out.reserve(rows.size());
  for (auto& [traj_id, stages] : rows) {
    const int T = static_cast<int>(stages.size()) - 1;
    JointTrajectory tr;
    for (int t = 0; t <= T; ++t) {
      auto st = stages.find(t);
      if (st == stages.end() || st->second.size() != 2)
        throw SchemaError("trajectory " + std::to_string(traj_id) +
                          " is missing rows at t=" + std::to_string(t));
      tr.states.emplace_back(st->second.at(0).x, st->second.at(1).x);
      if (t > 0) {
        tr.actions_i.push_back(st->second.at(0).u);
        tr.actions_j.push_back(st->second.at(1).u);
      }
    }
    tr.check_consistent();
    out.push_back(std::move(tr));
  }
  return out;
}

std::vector<JointTrajectory> read_batch_csv(const std::string& path, int state_dim_i,
                                            int state_dim_j, int action_dim_i,
                                            int action_dim_j) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open CSV: " + path);
  return read_batch_csv(in, state_dim_i, state_dim_j, action_dim_i, action_dim_j);
}

}  // namespace trajgame

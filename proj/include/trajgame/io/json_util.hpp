#pragma once

#include <nlohmann/json.hpp>

#include "trajgame/core/types.hpp"

namespace trajgame {

inline nlohmann::ordered_json to_json(const VectorXd& v) {
  auto j = nlohmann::ordered_json::array();
  for (int k = 0; k < v.size(); ++k) j.push_back(v[k]);
  return j;
}

inline nlohmann::ordered_json to_json(const MatrixXd& m) {
  auto j = nlohmann::ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

inline VectorXd vector_from_json(const nlohmann::ordered_json& j) {
  VectorXd v(j.size());
  for (size_t k = 0; k < j.size(); ++k) v[k] = j[k].get<double>();
  return v;
}

inline MatrixXd matrix_from_json(const nlohmann::ordered_json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

}  // namespace trajgame

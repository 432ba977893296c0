#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace trajgame {

inline constexpr const char* kToolVersion = "0.1.0";

// Written atomically alongside every output set; records everything needed
// to re-run the command.
struct RunManifest {
  std::string command;        // argv joined with spaces
  std::string subcommand;
  std::string scenario_path;  // empty when the command takes none
  uint64_t seed = 0;
  nlohmann::ordered_json* overrides = nullptr;  // set internally
  std::string output_dir;
  double duration_seconds = 0.0;
};

void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& subcommand, const std::string& scenario_path,
                    uint64_t seed, const nlohmann::ordered_json& overrides,
                    double duration_seconds);

}  // namespace trajgame

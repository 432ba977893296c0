#include "trajgame/cli/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "trajgame/core/types.hpp"

namespace trajgame {

void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& subcommand, const std::string& scenario_path,
                    uint64_t seed, const nlohmann::ordered_json& overrides,
                    double duration_seconds) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["subcommand"] = subcommand;
  j["scenario"] = scenario_path;
  j["seed"] = seed;
  j["overrides"] = overrides;
  j["output_dir"] = dir;
  j["duration_seconds"] = duration_seconds;

  const std::filesystem::path final_path = std::filesystem::path(dir) / "manifest.json";
  const std::filesystem::path tmp_path = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp_path);
    if (!out) throw Error("cannot write manifest: " + tmp_path.string());
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp_path, final_path);
}

}  // namespace trajgame

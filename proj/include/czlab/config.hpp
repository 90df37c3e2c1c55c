#pragma once

#include <cstdint>
#include <vector>
#include <string>

#include "json.hpp"

namespace czlab {

// One experiment per file: operation name, mandatory seed, optional measure
// and kernel specs (re-serialized for the factories), free-form parameters.
struct ExperimentConfig {
  nlohmann::json raw;
  std::string operation;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware default
  std::string measure_spec;
  std::string kernel_spec;
  nlohmann::json params = nlohmann::json::object();
};

// Parse and validate; throws std::invalid_argument whose message lists every
// violated field, not just the first.
ExperimentConfig load_config_text(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

const std::vector<std::string>& known_operations();

}  // namespace czlab

#include "czlab/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace czlab {

const std::vector<std::string>& known_operations() {
  static const std::vector<std::string> ops = {
      "measure-gen", "apply",    "norm",     "defect",            "ttilde",
      "riesz-system", "collapse-schedule", "porosity", "riesz-checks", "suite"};
  return ops;
}

ExperimentConfig load_config_text(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }

  std::vector<std::string> problems;
  ExperimentConfig cfg;
  cfg.raw = j;

  if (!j.contains("operation") || !j["operation"].is_string()) {
    problems.push_back("operation: required string");
  } else {
    cfg.operation = j["operation"].get<std::string>();
    bool known = false;
    for (const auto& op : known_operations()) known = known || op == cfg.operation;
    if (!known) problems.push_back("operation: unknown '" + cfg.operation + "'");
  }

  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
    problems.push_back("seed: required unsigned integer");
  } else {
    cfg.seed = j["seed"].get<std::uint64_t>();
  }

  if (j.contains("threads")) {
    if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 0)
      problems.push_back("threads: must be a non-negative integer");
    else
      cfg.threads = j["threads"].get<int>();
  }

  if (j.contains("measure")) {
    if (!j["measure"].is_object())
      problems.push_back("measure: must be an object");
    else if (!j["measure"].contains("kind"))
      problems.push_back("measure.kind: required");
    else
      cfg.measure_spec = j["measure"].dump();
  }

  if (j.contains("kernel")) {
    if (!j["kernel"].is_object())
      problems.push_back("kernel: must be an object");
    else if (!j["kernel"].contains("kind"))
      problems.push_back("kernel.kind: required");
    else
      cfg.kernel_spec = j["kernel"].dump();
  }

  if (j.contains("params")) {
    if (!j["params"].is_object()) {
      problems.push_back("params: must be an object");
    } else {
      cfg.params = j["params"];
      for (auto it = cfg.params.begin(); it != cfg.params.end(); ++it) {
        if (it.key().find("tol") == std::string::npos) continue;
        if (!it.value().is_number() || it.value().get<double>() <= 0.0)
          problems.push_back("params." + it.key() + ": tolerances must be positive numbers");
      }
    }
  }

  if (!problems.empty()) {
    std::string msg = "config invalid:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

}  // namespace czlab

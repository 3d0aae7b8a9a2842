#pragma once

#include <map>
#include <string>

#include "mixnet/data_model.hpp"
#include "mixnet/model_config.hpp"

namespace mixnet {

// A run configuration file: JSON with strictly validated keys. Unknown keys
// are rejected at every nesting level so typos never silently change a run.
struct RunConfig {
  std::string data_path;
  std::string output_dir = ".";
  std::map<std::string, VariableKind> type_overrides;
  ModelConfig model;
  bool save_data = false;
  bool has_layers = false;
  LayerInput layers;
};

// Parses and validates configuration text; every problem is a ConfigError
// naming the offending key.
RunConfig parse_run_config(const std::string& json_text);

RunConfig load_run_config(const std::string& path);

// Canonical JSON echo of a configuration (stable key order), embedded in
// fit archives so a fit records exactly what produced it.
std::string run_config_to_json(const RunConfig& rc);

}  // namespace mixnet

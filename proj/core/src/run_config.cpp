#include "mixnet/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mixnet/errors.hpp"

namespace mixnet {
namespace {

using json = nlohmann::ordered_json;

void require_known_keys(const json& obj, const std::string& context,
                        const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("config: unknown key '" + item.key() + "' in " + context);
    }
  }
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string get_string(const json& obj, const std::string& key, const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError("config: key '" + key + "' must be a string");
  return v->get<std::string>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError("config: key '" + key + "' must be true or false");
  return v->get<bool>();
}

int get_int(const json& obj, const std::string& key, int fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError("config: key '" + key + "' must be an integer");
  return v->get<int>();
}

std::uint64_t get_seed(const json& obj, const std::string& key, std::uint64_t fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<long long>() >= 0) {
    return static_cast<std::uint64_t>(v->get<long long>());
  }
  throw ConfigError("config: key '" + key + "' must be a non-negative integer");
}

double get_number(const json& obj, const std::string& key, double fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError("config: key '" + key + "' must be a number");
  return v->get<double>();
}

std::vector<std::string> get_string_list(const json& obj, const std::string& key) {
  std::vector<std::string> out;
  const json* v = find(obj, key);
  if (!v) return out;
  if (!v->is_array()) throw ConfigError("config: key '" + key + "' must be a list of strings");
  for (const json& e : *v) {
    if (!e.is_string()) throw ConfigError("config: key '" + key + "' must be a list of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: the document must be a JSON object");

  require_known_keys(root, "the configuration",
                     {"data", "output_dir", "types", "lambda_selection", "alpha_grid", "n_lambda",
                      "lambda_min_ratio", "rule", "scale", "reps", "quantile_level", "seed_model",
                      "seed_boot", "cluster_method", "walktrap_steps", "covariates",
                      "exclude_from_cluster", "treat_singletons_as_excluded",
                      "normalize_loadings", "workers", "stability_cutoff", "save_data", "layers"});

  RunConfig rc;
  rc.data_path = get_string(root, "data", "");
  rc.output_dir = get_string(root, "output_dir", ".");
  rc.save_data = get_bool(root, "save_data", false);

  if (const json* types = find(root, "types")) {
    if (!types->is_object()) {
      throw ConfigError("config: 'types' must map column names to kind names");
    }
    for (const auto& item : types->items()) {
      if (!item.value().is_string()) {
        throw ConfigError("config: type override for '" + item.key() + "' must be a string");
      }
      rc.type_overrides[item.key()] = parse_kind(item.value().get<std::string>());
    }
  }

  ModelConfig& m = rc.model;
  if (const json* sel = find(root, "lambda_selection")) {
    if (!sel->is_object()) throw ConfigError("config: 'lambda_selection' must be an object");
    require_known_keys(*sel, "'lambda_selection'", {"method", "folds", "gamma"});
    m.selection = get_string(*sel, "method", m.selection);
    m.folds = get_int(*sel, "folds", m.folds);
    m.ebic_gamma = get_number(*sel, "gamma", m.ebic_gamma);
  }
  if (const json* grid = find(root, "alpha_grid")) {
    if (!grid->is_array() || grid->empty()) {
      throw ConfigError("config: 'alpha_grid' must be a non-empty list of numbers");
    }
    m.alphas.clear();
    for (const json& a : *grid) {
      if (!a.is_number()) throw ConfigError("config: 'alpha_grid' must contain numbers");
      m.alphas.push_back(a.get<double>());
    }
  }
  m.n_lambda = get_int(root, "n_lambda", m.n_lambda);
  m.lambda_min_ratio = get_number(root, "lambda_min_ratio", m.lambda_min_ratio);
  m.edge_rule = get_string(root, "rule", m.edge_rule);
  m.scale_gaussian = get_bool(root, "scale", m.scale_gaussian);
  m.seed_model = get_seed(root, "seed_model", m.seed_model);
  m.seed_boot = get_seed(root, "seed_boot", m.seed_boot);
  m.cluster_method = get_string(root, "cluster_method", m.cluster_method);
  m.walktrap_steps = get_int(root, "walktrap_steps", m.walktrap_steps);
  m.covariates = get_string_list(root, "covariates");
  m.exclude_from_cluster = get_string_list(root, "exclude_from_cluster");
  m.exclude_singletons = get_bool(root, "treat_singletons_as_excluded", m.exclude_singletons);
  m.normalize_loadings = get_bool(root, "normalize_loadings", m.normalize_loadings);
  m.boot_reps = get_int(root, "reps", m.boot_reps);
  m.quantile_level = get_number(root, "quantile_level", m.quantile_level);
  m.workers = get_int(root, "workers", m.workers);
  m.stability_cutoff = get_number(root, "stability_cutoff", m.stability_cutoff);

  if (const json* layers = find(root, "layers")) {
    if (!layers->is_object()) throw ConfigError("config: 'layers' must be an object");
    require_known_keys(*layers, "'layers'", {"labels", "assignment", "rules"});
    rc.has_layers = true;
    rc.layers.labels = get_string_list(*layers, "labels");
    if (rc.layers.labels.empty()) {
      throw ConfigError("config: 'layers.labels' must list at least one layer");
    }
    const json* assign = find(*layers, "assignment");
    if (!assign || !assign->is_object()) {
      throw ConfigError("config: 'layers.assignment' must map node names to layer labels");
    }
    for (const auto& item : assign->items()) {
      if (!item.value().is_string()) {
        throw ConfigError("config: layer assignment for '" + item.key() + "' must be a string");
      }
      rc.layers.assignment[item.key()] = item.value().get<std::string>();
    }
    if (const json* rules = find(*layers, "rules")) {
      if (!rules->is_array()) {
        throw ConfigError("config: 'layers.rules' must be a list of [layer, layer, 0|1] rows");
      }
      for (const json& row : *rules) {
        if (!row.is_array() || row.size() != 3 || !row[0].is_string() || !row[1].is_string() ||
            !row[2].is_number_integer()) {
          throw ConfigError("config: 'layers.rules' rows must be [layer, layer, 0|1]");
        }
        rc.layers.rules.push_back(
            {row[0].get<std::string>(), row[1].get<std::string>(), row[2].get<int>()});
      }
    }
  }

  validate_config(rc.model);
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string run_config_to_json(const RunConfig& rc) {
  json root;
  root["data"] = rc.data_path;
  root["output_dir"] = rc.output_dir;
  if (!rc.type_overrides.empty()) {
    json types = json::object();
    for (const auto& [name, kind] : rc.type_overrides) types[name] = kind_name(kind);
    root["types"] = types;
  }
  const ModelConfig& m = rc.model;
  root["lambda_selection"] = {{"method", m.selection}, {"folds", m.folds}, {"gamma", m.ebic_gamma}};
  root["alpha_grid"] = m.alphas;
  root["n_lambda"] = m.n_lambda;
  root["lambda_min_ratio"] = m.lambda_min_ratio;
  root["rule"] = m.edge_rule;
  root["scale"] = m.scale_gaussian;
  root["seed_model"] = m.seed_model;
  root["seed_boot"] = m.seed_boot;
  root["cluster_method"] = m.cluster_method;
  root["walktrap_steps"] = m.walktrap_steps;
  root["covariates"] = m.covariates;
  root["exclude_from_cluster"] = m.exclude_from_cluster;
  root["treat_singletons_as_excluded"] = m.exclude_singletons;
  root["normalize_loadings"] = m.normalize_loadings;
  root["reps"] = m.boot_reps;
  root["quantile_level"] = m.quantile_level;
  root["workers"] = m.workers;
  root["stability_cutoff"] = m.stability_cutoff;
  root["save_data"] = rc.save_data;
  if (rc.has_layers) {
    json layers;
    layers["labels"] = rc.layers.labels;
    json assignment = json::object();
    for (const auto& [node, layer] : rc.layers.assignment) assignment[node] = layer;
    layers["assignment"] = assignment;
    json rules = json::array();
    for (const LayerRule& r : rc.layers.rules) rules.push_back(json::array({r.a, r.b, r.allowed}));
    layers["rules"] = rules;
    root["layers"] = layers;
  }
  return root.dump(2);
}

}  // namespace mixnet

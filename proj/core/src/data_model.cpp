#include "mixnet/data_model.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <unordered_map>

#include "mixnet/errors.hpp"

namespace mixnet {

namespace {

bool is_missing_token(const std::string& t) {
  return t.empty() || t == "NA" || t == "NaN" || t == "nan";
}

bool parse_number(const std::string& t, double* out) {
  const char* begin = t.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') return false;
  *out = v;
  return true;
}

bool is_integer_token(const std::string& t) {
  std::size_t i = 0;
  if (i < t.size() && (t[i] == '+' || t[i] == '-')) ++i;
  if (i == t.size()) return false;
  for (; i < t.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
  }
  return true;
}

bool boolean_token(const std::string& t, bool* value) {
  std::string low;
  low.reserve(t.size());
  for (char ch : t) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (low == "true") { *value = true; return true; }
  if (low == "false") { *value = false; return true; }
  return false;
}

Variable make_categorical(const std::string& name, const std::vector<std::string>& tokens,
                          Eigen::Ref<Eigen::VectorXd> out) {
  Variable var;
  var.name = name;
  var.kind = VariableKind::categorical;
  std::unordered_map<std::string, int> index;
  for (std::size_t r = 0; r < tokens.size(); ++r) {
    auto it = index.find(tokens[r]);
    int level;
    if (it == index.end()) {
      level = static_cast<int>(var.levels.size());
      var.levels.push_back(tokens[r]);
      index.emplace(tokens[r], level);
    } else {
      level = it->second;
    }
    out[static_cast<Eigen::Index>(r)] = level;
  }
  if (var.n_levels() < 2) {
    throw DataError("column '" + name + "' has a single distinct value");
  }
  return var;
}

}  // namespace

std::string kind_name(VariableKind k) {
  switch (k) {
    case VariableKind::gaussian: return "gaussian";
    case VariableKind::poisson: return "poisson";
    case VariableKind::categorical: return "categorical";
  }
  return "?";
}

VariableKind parse_kind(const std::string& token) {
  if (token == "gaussian" || token == "g") return VariableKind::gaussian;
  if (token == "poisson" || token == "p") return VariableKind::poisson;
  if (token == "categorical" || token == "c") return VariableKind::categorical;
  throw ConfigError("unknown variable kind '" + token + "' (expected gaussian, poisson or categorical)");
}

int Dataset::column(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

Dataset infer_types(const RawTable& raw, const std::map<std::string, VariableKind>& overrides,
                    InferenceReport* report) {
  int n = raw.n_rows();
  int p = raw.n_cols();
  if (p == 0) throw DataError("dataset has no columns");
  if (n < 2) throw DataError("dataset needs at least 2 rows, got " + std::to_string(n));

  {
    std::set<std::string> seen;
    for (const auto& name : raw.names) {
      if (name.empty()) throw DataError("dataset has an empty column name");
      if (!seen.insert(name).second) throw DataError("duplicate column name '" + name + "'");
    }
  }
  for (const auto& [name, kind] : overrides) {
    (void)kind;
    if (std::find(raw.names.begin(), raw.names.end(), name) == raw.names.end()) {
      throw ConfigError("type override names unknown column '" + name + "'");
    }
  }

  Dataset ds;
  ds.values.resize(n, p);
  ds.variables.resize(p);

  for (int c = 0; c < p; ++c) {
    const auto& name = raw.names[c];
    const auto& tokens = raw.columns[c];
    for (int r = 0; r < n; ++r) {
      if (is_missing_token(tokens[r])) {
        throw DataError("missing value in column '" + name + "' (row " + std::to_string(r + 1) +
                        "); complete cases are required");
      }
    }

    std::vector<double> numeric(n);
    bool all_numeric = true;
    bool all_integer = true;
    for (int r = 0; r < n && all_numeric; ++r) {
      if (!parse_number(tokens[r], &numeric[r])) all_numeric = false;
      else if (!is_integer_token(tokens[r])) all_integer = false;
    }

    auto ov = overrides.find(name);
    if (ov != overrides.end()) {
      if (report) report->overridden.push_back(name);
      switch (ov->second) {
        case VariableKind::gaussian: {
          if (!all_numeric) throw DataError("column '" + name + "' declared gaussian but holds non-numeric values");
          for (int r = 0; r < n; ++r) ds.values(r, c) = numeric[r];
          ds.variables[c] = {name, VariableKind::gaussian, {}};
          break;
        }
        case VariableKind::poisson: {
          if (!all_numeric || !all_integer) {
            throw DataError("column '" + name + "' declared poisson but holds non-integer values");
          }
          for (int r = 0; r < n; ++r) {
            if (numeric[r] < 0) throw DataError("column '" + name + "' declared poisson but holds negative values");
            ds.values(r, c) = numeric[r];
          }
          ds.variables[c] = {name, VariableKind::poisson, {}};
          break;
        }
        case VariableKind::categorical: {
          ds.variables[c] = make_categorical(name, tokens, ds.values.col(c));
          break;
        }
      }
      continue;
    }

    bool bool_column = true;
    for (int r = 0; r < n && bool_column; ++r) {
      bool dummy;
      bool_column = boolean_token(tokens[r], &dummy);
    }
    if (bool_column) {
      // merge case variants of the same truth value but keep the spelling the
      // column used first, so levels stay recognizable in reports
      std::string true_label, false_label;
      for (int r = 0; r < n; ++r) {
        bool v = false;
        boolean_token(tokens[r], &v);
        std::string& label = v ? true_label : false_label;
        if (label.empty()) label = tokens[r];
      }
      std::vector<std::string> canonical(n);
      for (int r = 0; r < n; ++r) {
        bool v = false;
        boolean_token(tokens[r], &v);
        canonical[r] = v ? true_label : false_label;
      }
      ds.variables[c] = make_categorical(name, canonical, ds.values.col(c));
      if (report) report->categorical_inferred.push_back(name);
      continue;
    }

    if (!all_numeric) {
      ds.variables[c] = make_categorical(name, tokens, ds.values.col(c));
      if (report) report->categorical_inferred.push_back(name);
      continue;
    }

    if (all_integer) {
      bool within_01 = true;
      bool non_negative = true;
      for (int r = 0; r < n; ++r) {
        if (numeric[r] != 0.0 && numeric[r] != 1.0) within_01 = false;
        if (numeric[r] < 0.0) non_negative = false;
      }
      if (within_01) {
        ds.variables[c] = make_categorical(name, tokens, ds.values.col(c));
        if (report) report->categorical_inferred.push_back(name);
        continue;
      }
      if (non_negative) {
        for (int r = 0; r < n; ++r) ds.values(r, c) = numeric[r];
        ds.variables[c] = {name, VariableKind::poisson, {}};
        std::set<double> distinct(numeric.begin(), numeric.end());
        if (distinct.size() < 2) throw DataError("column '" + name + "' has a single distinct value");
        continue;
      }
    }

    for (int r = 0; r < n; ++r) ds.values(r, c) = numeric[r];
    ds.variables[c] = {name, VariableKind::gaussian, {}};
    std::set<double> distinct(numeric.begin(), numeric.end());
    if (distinct.size() < 2) throw DataError("column '" + name + "' has a single distinct value");
  }

  return ds;
}

RawTable dataset_to_raw(const Dataset& ds) {
  RawTable raw;
  raw.names.reserve(ds.variables.size());
  for (const auto& v : ds.variables) raw.names.push_back(v.name);
  raw.columns.resize(ds.p());
  for (int c = 0; c < ds.p(); ++c) {
    auto& col = raw.columns[c];
    col.resize(ds.n());
    const auto& var = ds.variables[c];
    for (int r = 0; r < ds.n(); ++r) {
      double v = ds.values(r, c);
      switch (var.kind) {
        case VariableKind::categorical:
          col[r] = var.levels[static_cast<std::size_t>(v)];
          break;
        case VariableKind::poisson:
          col[r] = format_double(v);
          break;
        case VariableKind::gaussian: {
          std::string s = format_double(v);
          if (s.find_first_of(".en") == std::string::npos) s += ".0";
          col[r] = s;
          break;
        }
      }
    }
  }
  return raw;
}

Dataset standardize(const Dataset& ds, bool scale_gaussian, ScalingReport* report) {
  int n = ds.n();
  if (n < 2) throw DataError("standardize needs at least 2 rows");
  Dataset out = ds;
  if (report) {
    report->mean.assign(ds.p(), 0.0);
    report->sd.assign(ds.p(), 0.0);
    report->scaled.assign(ds.p(), 0);
  }
  for (int c = 0; c < ds.p(); ++c) {
    double mean = ds.values.col(c).mean();
    double ss = (ds.values.col(c).array() - mean).square().sum();
    double sd = std::sqrt(ss / (n - 1));
    if (report) {
      report->mean[c] = mean;
      report->sd[c] = sd;
    }
    if (ds.variables[c].kind == VariableKind::gaussian && scale_gaussian) {
      if (sd == 0.0) throw DataError("column '" + ds.variables[c].name + "' has zero variance");
      out.values.col(c) = (ds.values.col(c).array() - mean) / sd;
      if (report) report->scaled[c] = 1;
    }
  }
  return out;
}

int LayerSpec::layer_index(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> network_columns(const Dataset& ds, const std::vector<std::string>& covariates) {
  for (const auto& cov : covariates) {
    if (ds.column(cov) < 0) throw ConfigError("covariate '" + cov + "' is not a dataset column");
  }
  std::set<std::string> cov_set(covariates.begin(), covariates.end());
  std::vector<int> cols;
  for (int c = 0; c < ds.p(); ++c) {
    if (!cov_set.count(ds.variables[c].name)) cols.push_back(c);
  }
  if (cols.size() < 2) throw DataError("network needs at least 2 non-covariate columns");
  return cols;
}

LayerSpec validate_layers(const Dataset& ds, const LayerInput& input,
                          const std::vector<std::string>& covariates) {
  if (input.labels.empty()) throw DataError("layer specification has no layers");
  {
    std::set<std::string> seen;
    for (const auto& label : input.labels) {
      if (label.empty()) throw DataError("layer label must be non-empty");
      if (!seen.insert(label).second) throw DataError("duplicate layer label '" + label + "'");
    }
  }

  LayerSpec spec;
  spec.labels = input.labels;
  int L = spec.n_layers();

  std::set<std::string> cov_set(covariates.begin(), covariates.end());
  for (const auto& [name, label] : input.assignment) {
    if (ds.column(name) < 0) throw DataError("layer assignment names unknown column '" + name + "'");
    if (cov_set.count(name)) throw DataError("covariate '" + name + "' cannot be assigned to a layer");
    if (spec.layer_index(label) < 0) {
      throw DataError("node '" + name + "' is assigned to unknown layer '" + label + "'");
    }
  }

  auto nodes = network_columns(ds, covariates);
  spec.node_layer.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& name = ds.variables[nodes[i]].name;
    auto it = input.assignment.find(name);
    if (it == input.assignment.end()) throw DataError("node '" + name + "' has no layer assignment");
    spec.node_layer[i] = spec.layer_index(it->second);
  }

  spec.rules = Eigen::MatrixXi::Zero(L, L);
  for (int l = 0; l < L; ++l) spec.rules(l, l) = 1;
  for (const auto& rule : input.rules) {
    int a = spec.layer_index(rule.a);
    int b = spec.layer_index(rule.b);
    if (a < 0) throw DataError("layer rule names unknown layer '" + rule.a + "'");
    if (b < 0) throw DataError("layer rule names unknown layer '" + rule.b + "'");
    if (rule.allowed != 0 && rule.allowed != 1) {
      throw DataError("layer rule for (" + rule.a + ", " + rule.b + ") must be 0 or 1");
    }
    if (rule.allowed == 1) {
      spec.rules(a, b) = 1;
      spec.rules(b, a) = 1;
    }
  }
  for (int l = 0; l < L; ++l) spec.rules(l, l) = 1;
  return spec;
}

LayerSpec single_layer_spec(int n_nodes) {
  LayerSpec spec;
  spec.labels = {"1"};
  spec.node_layer.assign(static_cast<std::size_t>(n_nodes), 0);
  spec.rules = Eigen::MatrixXi::Ones(1, 1);
  return spec;
}

}  // namespace mixnet

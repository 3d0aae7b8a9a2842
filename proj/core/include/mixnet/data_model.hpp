#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "mixnet/csv.hpp"

namespace mixnet {

enum class VariableKind { gaussian, poisson, categorical };

std::string kind_name(VariableKind k);

// Accepts "gaussian"/"g", "poisson"/"p", "categorical"/"c".
VariableKind parse_kind(const std::string& token);

struct Variable {
  std::string name;
  VariableKind kind = VariableKind::gaussian;
  std::vector<std::string> levels;  // categorical only, first-appearance order

  int n_levels() const { return static_cast<int>(levels.size()); }
};

// Typed rectangular data. Categorical cells store 0-based level indices.
struct Dataset {
  std::vector<Variable> variables;
  Eigen::MatrixXd values;  // n x p

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
  int column(const std::string& name) const;
};

struct InferenceReport {
  std::vector<std::string> categorical_inferred;  // inferred, not overridden
  std::vector<std::string> overridden;
};

// Typing rules, applied per column unless overridden:
//  - any non-numeric token       -> categorical, levels by first appearance
//  - integers within {0, 1}      -> categorical with levels "0"/"1"
//  - non-negative integers       -> poisson
//  - anything else numeric       -> gaussian (negative integers included)
// Missing cells ("", NA, NaN, nan) and single-valued columns are rejected.
Dataset infer_types(const RawTable& raw, const std::map<std::string, VariableKind>& overrides,
                    InferenceReport* report = nullptr);

// Inverse of infer_types up to formatting; gaussian values keep an explicit
// decimal form so typing the output again reproduces the same kinds.
RawTable dataset_to_raw(const Dataset& ds);

// Raw-data location and scale per column, retained so later score
// computations can standardize new observations consistently. Categorical
// stats are over the 0-based level indices.
struct ScalingReport {
  std::vector<double> mean;
  std::vector<double> sd;  // sample sd, 1/(n-1)
  std::vector<char> scaled;
};

// Centers and scales gaussian columns when scale_gaussian is set; other
// kinds pass through. Stats for every column are recorded in the report.
Dataset standardize(const Dataset& ds, bool scale_gaussian, ScalingReport* report = nullptr);

struct LayerRule {
  std::string a;
  std::string b;
  int allowed = 0;  // must be 0 or 1
};

struct LayerInput {
  std::vector<std::string> labels;  // declaration order
  std::map<std::string, std::string> assignment;
  std::vector<LayerRule> rules;
};

struct LayerSpec {
  std::vector<std::string> labels;
  std::vector<int> node_layer;  // per network node, indexes labels
  Eigen::MatrixXi rules;        // L x L symmetric 0/1 with unit diagonal

  int n_layers() const { return static_cast<int>(labels.size()); }
  int layer_index(const std::string& label) const;
};

// Dataset column indices that participate in the network (covariates by
// name removed, order preserved).
std::vector<int> network_columns(const Dataset& ds, const std::vector<std::string>& covariates);

// Checks assignments and rules against the dataset, symmetrizes the rule
// matrix (a pair is allowed if either direction was declared allowed) and
// forces the diagonal to 1.
LayerSpec validate_layers(const Dataset& ds, const LayerInput& input,
                          const std::vector<std::string>& covariates);

// Trivial one-layer spec used by single-layer estimation.
LayerSpec single_layer_spec(int n_nodes);

}  // namespace mixnet

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "mixnet/data_model.hpp"
#include "mixnet/glm.hpp"
#include "mixnet/model_config.hpp"

namespace mixnet {

// Design matrix for one response node. Node columns come first in node
// order; a categorical predictor with K levels contributes K-1 indicator
// columns (first level is the reference). Covariate columns follow in
// declaration order. Every column is penalized.
struct DesignInfo {
  Eigen::MatrixXd X;
  std::vector<int> col_node;   // network node index per column, -1 for covariates
  std::vector<int> col_level;  // encoded level for indicator columns, -1 otherwise
};

DesignInfo build_design(const Dataset& ds, const std::vector<int>& node_cols,
                        const std::vector<int>& covariate_cols, int response_node,
                        const std::vector<char>& allowed);

struct NodewiseFit {
  int node = -1;
  double lambda = 0.0;
  double alpha = 1.0;
  double criterion = 0.0;
  std::string selection_method;
  glm::Coefficients coef;  // raw scale; empty when the design had no columns
  std::vector<int> col_node;
  std::vector<int> col_level;
};

// Fits the penalized regression of node `response_node` on every allowed
// other node plus covariates. The CV fold seed is seed_model XOR the node
// index, so nodewise fits do not depend on evaluation order.
NodewiseFit fit_node(const Dataset& ds, const std::vector<int>& node_cols,
                     const std::vector<int>& covariate_cols, int response_node,
                     const std::vector<char>& allowed, const ModelConfig& cfg);

// Mean absolute coefficient of the block of columns encoding predictor
// node t (zero entries included, covariates never). Zero when unselected.
double direction_magnitude(const NodewiseFit& fit, int t);

struct EdgeAggregate {
  Eigen::MatrixXd weights;  // p x p symmetric magnitudes, zero diagonal
  Eigen::MatrixXi signs;    // -1/0/+1; meaningful where weights > 0
  // pairs whose two directions disagreed in sign (sign reported as 0)
  std::vector<std::pair<int, int>> sign_conflicts;
};

// Combines the two directed magnitudes per pair. "and" keeps an edge only
// when both directions selected it (weight = mean of both); "or" keeps it
// when either did (weight = mean of the nonzero directions). An edge with a
// categorical endpoint of 3+ levels has sign +1; otherwise the sign comes
// from the single-coefficient directions, 0 on disagreement.
EdgeAggregate aggregate_edges(const std::vector<NodewiseFit>& fits,
                              const std::vector<VariableKind>& node_kinds,
                              const std::string& rule, const Eigen::MatrixXi& allowed);

struct NetworkFit {
  std::vector<std::string> node_names;
  std::vector<VariableKind> node_kinds;
  std::vector<int> node_column;  // network node -> dataset column
  Eigen::MatrixXd weights;
  Eigen::MatrixXi signs;
  std::vector<std::pair<int, int>> sign_conflicts;
  std::vector<NodewiseFit> nodewise;

  int p() const { return static_cast<int>(node_names.size()); }
};

// Nodewise estimation restricted to an allowed-pair mask (p x p, symmetric);
// forbidden pairs never enter a design, so their edges are structurally zero.
NetworkFit estimate_network_masked(const Dataset& ds, const ModelConfig& cfg,
                                   const Eigen::MatrixXi& allowed);

// Single-layer estimation: the all-pairs-allowed special case.
NetworkFit estimate_network(const Dataset& ds, const ModelConfig& cfg);

}  // namespace mixnet

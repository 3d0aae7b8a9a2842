#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mixnet/community.hpp"

namespace mixnet {

// Tolerance for treating two path lengths as tied. Shared with the
// exhaustive oracles in the test suite so both sides count the same paths.
inline bool approx_equal_path(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// One node-level index value. Nodes are indices into the graph the function
// was called with; layer is a display label.
struct IndexRow {
  int node = 0;
  std::string layer;
  std::string metric;
  double value = 0.0;
};

struct IndexTable {
  std::vector<IndexRow> rows;
  std::vector<int> flagged;  // nodes whose EI-type values used an undefined sign

  // NaN when the (node, metric) pair is absent.
  double value(int node, const std::string& metric) const;
};

// Shortest-path distances on edge lengths 1/w (absolute weights). Metrics:
//   strength            sum of incident weights
//   expected_influence  signed sum (undefined sign counts +, node flagged)
//   closeness           1 / sum of distances to reachable nodes, 0 if none
//   betweenness         Brandes dependency sum over unordered pairs
IndexTable general_indices(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                           const std::string& layer = "1");

// Bridge variants for assigned nodes; cross-community targets must be
// assigned. Requires at least 2 communities. bridge_ei2 adds one step of
// neighbor propagation, excluding the edge back to the indexed node.
IndexTable bridge_indices(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                          const Partition& part, const std::string& layer = "1");

// Same formulas for excluded nodes, with every assigned node a valid target.
// Empty table when nothing is excluded; betweenness rows need 2 communities.
IndexTable excluded_bridge_indices(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                                   const Partition& part, const std::string& layer = "1");

// Strength / EI / closeness / betweenness on the interlayer-only subgraph.
// Rows carry each node's own layer label.
IndexTable interlayer_indices(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                              const std::vector<int>& node_layer,
                              const std::vector<std::string>& layer_labels);

struct BridgeContribution {
  int community = 0;
  double strength = 0.0;
  double ei1 = 0.0;
};

// Additive per-community decomposition of bridge_strength and bridge_ei1
// (excluded variants when the node is excluded). Lists every qualifying
// community, zero contributions included; contributions sum to the overall
// value exactly.
struct BridgeDecomposition {
  int node = 0;
  bool excluded = false;
  std::vector<BridgeContribution> contributions;
  double strength_total = 0.0;
  double ei1_total = 0.0;
};

BridgeDecomposition find_bridge_communities(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                                            const Partition& part, int node);

}  // namespace mixnet

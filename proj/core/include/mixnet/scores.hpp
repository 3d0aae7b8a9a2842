#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mixnet/community.hpp"
#include "mixnet/csv.hpp"
#include "mixnet/data_model.hpp"
#include "mixnet/mgm.hpp"

namespace mixnet {

// Network loadings o_jc: node j's absolute strength restricted to its own
// community, zero elsewhere. With normalize set, every column is scaled to
// unit sum (all-zero columns stay zero) so scores are comparable across
// communities of different sizes.
Eigen::MatrixXd network_loadings(const Eigen::MatrixXd& weights, const Partition& part,
                                 bool normalize);

// How one node's raw values become standardized inputs to a score.
struct NodeScoreSpec {
  std::string name;
  VariableKind kind = VariableKind::gaussian;
  std::vector<std::string> levels;  // categorical: training level tokens
  double mean = 0.0;                // training statistics
  double sd = 1.0;
};

// Per-node scoring info assembled from the fitted nodes, the training
// variable definitions, and the training scaling report.
std::vector<NodeScoreSpec> score_spec(const NetworkFit& net,
                                      const std::vector<Variable>& training_variables,
                                      const ScalingReport& scaling);

// Standardized node values z_ij for the raw observations, using training
// means and SDs. Gaussian and poisson values are z-scored; binary
// categorical values are z-scored 0/1 level codes. A categorical node with
// 3 or more levels inside a scored community is rejected. Columns are
// matched by name; a column may be missing only when the node's loadings
// row is all zero (the value then never enters a score and is set to 0).
Eigen::MatrixXd standardized_node_values(const RawTable& data,
                                         const std::vector<NodeScoreSpec>& spec,
                                         const Eigen::MatrixXd& loadings, const Partition& part);

// s_ic = sum_j z_ij * o_jc.
Eigen::MatrixXd community_scores(const Eigen::MatrixXd& z, const Eigen::MatrixXd& loadings);

}  // namespace mixnet

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mixnet/data_model.hpp"
#include "mixnet/mgm.hpp"

namespace mixnet {

// Node-pair mask induced by the layer rule matrix: pair (i, j) is allowed
// exactly when the rule for their two layers is 1.
Eigen::MatrixXi build_mask(const LayerSpec& spec);

// Canonical label for an unordered layer pair, lower declaration index
// first: "<label_i>_<label_j>".
std::string layer_pair_key(const LayerSpec& spec, int layer_a, int layer_b);

bool is_interlayer(const LayerSpec& spec, int node_i, int node_j);

// Present edges (weight > 0, i < j) within one layer.
int count_intralayer_edges(const Eigen::MatrixXd& weights, const LayerSpec& spec, int layer);

// Present edges between two distinct layers.
int count_interlayer_edges(const Eigen::MatrixXd& weights, const LayerSpec& spec, int layer_a,
                           int layer_b);

// One layer's nodes with the edges among them; `nodes` maps local index to
// network node index.
struct Subgraph {
  Eigen::MatrixXd weights;
  Eigen::MatrixXi signs;
  std::vector<int> nodes;
};

Subgraph layer_subgraph(const Eigen::MatrixXd& weights, const Eigen::MatrixXi& signs,
                        const LayerSpec& spec, int layer);

// Masked nodewise estimation with the layer-rule mask. The spec must cover
// exactly the network nodes of the dataset under cfg.covariates.
NetworkFit estimate_multilayer(const Dataset& ds, const LayerSpec& spec, const ModelConfig& cfg);

}  // namespace mixnet

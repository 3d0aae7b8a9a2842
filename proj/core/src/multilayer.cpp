#include "mixnet/multilayer.hpp"

#include "mixnet/errors.hpp"

namespace mixnet {

Eigen::MatrixXi build_mask(const LayerSpec& spec) {
  const int p = static_cast<int>(spec.node_layer.size());
  Eigen::MatrixXi mask(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      mask(i, j) = spec.rules(spec.node_layer[i], spec.node_layer[j]);
    }
  }
  return mask;
}

std::string layer_pair_key(const LayerSpec& spec, int layer_a, int layer_b) {
  const int lo = std::min(layer_a, layer_b);
  const int hi = std::max(layer_a, layer_b);
  return spec.labels[lo] + "_" + spec.labels[hi];
}

bool is_interlayer(const LayerSpec& spec, int node_i, int node_j) {
  return spec.node_layer[node_i] != spec.node_layer[node_j];
}

int count_intralayer_edges(const Eigen::MatrixXd& weights, const LayerSpec& spec, int layer) {
  const int p = static_cast<int>(weights.rows());
  int count = 0;
  for (int i = 0; i < p; ++i) {
    if (spec.node_layer[i] != layer) continue;
    for (int j = i + 1; j < p; ++j) {
      if (spec.node_layer[j] == layer && weights(i, j) > 0.0) ++count;
    }
  }
  return count;
}

int count_interlayer_edges(const Eigen::MatrixXd& weights, const LayerSpec& spec, int layer_a,
                           int layer_b) {
  const int p = static_cast<int>(weights.rows());
  int count = 0;
  for (int i = 0; i < p; ++i) {
    if (spec.node_layer[i] != layer_a) continue;
    for (int j = 0; j < p; ++j) {
      if (spec.node_layer[j] == layer_b && weights(i, j) > 0.0) ++count;
    }
  }
  return count;
}

Subgraph layer_subgraph(const Eigen::MatrixXd& weights, const Eigen::MatrixXi& signs,
                        const LayerSpec& spec, int layer) {
  Subgraph sub;
  const int p = static_cast<int>(weights.rows());
  for (int i = 0; i < p; ++i) {
    if (spec.node_layer[i] == layer) sub.nodes.push_back(i);
  }
  const int m = static_cast<int>(sub.nodes.size());
  sub.weights.setZero(m, m);
  sub.signs.setZero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      sub.weights(a, b) = weights(sub.nodes[a], sub.nodes[b]);
      sub.signs(a, b) = signs(sub.nodes[a], sub.nodes[b]);
    }
  }
  return sub;
}

NetworkFit estimate_multilayer(const Dataset& ds, const LayerSpec& spec, const ModelConfig& cfg) {
  const std::vector<int> node_cols = network_columns(ds, cfg.covariates);
  if (spec.node_layer.size() != node_cols.size()) {
    throw DataError("layers: layer assignment covers " +
                    std::to_string(spec.node_layer.size()) + " nodes but the network has " +
                    std::to_string(node_cols.size()));
  }
  return estimate_network_masked(ds, cfg, build_mask(spec));
}

}  // namespace mixnet

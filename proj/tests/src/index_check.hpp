#pragma once

// Compact index-vs-oracle comparison used by the acceptance suite. Returns
// worst absolute deviations instead of asserting, so the caller can sweep
// many random graphs and report a single number.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "mixnet/indices.hpp"
#include "oracles.hpp"

namespace acceptance_check {

struct IndexErrors {
  double metric = 0.0;      // worst |library - oracle| over all metrics
  double additivity = 0.0;  // worst decomposition additivity violation
};

inline double signed_w(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S, int i, int j) {
  return (S(i, j) < 0 ? -1.0 : 1.0) * W(i, j);
}

// EI with one step of propagation: targets restricted by `target`, the inner
// sweep never revisits the indexed node.
inline double two_step_ei(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S, int v,
                          const std::vector<char>& target) {
  const int p = static_cast<int>(W.rows());
  double total = oracle::signed_sum(W, S, v, target);
  for (int u = 0; u < p; ++u) {
    if (u == v || W(v, u) <= 0.0) continue;
    double inner = 0.0;
    for (int t = 0; t < p; ++t) {
      if (t == u || t == v || W(u, t) <= 0.0) continue;
      if (!target[t]) continue;
      inner += signed_w(W, S, u, t);
    }
    total += signed_w(W, S, v, u) * inner;
  }
  return total;
}

inline IndexErrors compare_all_indices(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                                       const mixnet::Partition& part) {
  using mixnet::IndexTable;
  const int p = static_cast<int>(W.rows());
  IndexErrors err;
  auto note = [&err](double lib, double ref) {
    err.metric = std::max(err.metric, std::abs(lib - ref));
  };

  const oracle::PathData pd = oracle::enumerate_paths(W);
  const std::vector<char> all(static_cast<std::size_t>(p), 1);
  const std::vector<std::vector<char>> all_pairs(static_cast<std::size_t>(p),
                                                 std::vector<char>(static_cast<std::size_t>(p), 1));

  IndexTable gen = mixnet::general_indices(W, S);
  for (int v = 0; v < p; ++v) {
    note(gen.value(v, "strength"), oracle::abs_sum(W, v, all));
    note(gen.value(v, "expected_influence"), oracle::signed_sum(W, S, v, all));
    note(gen.value(v, "closeness"), oracle::closeness(pd, v, all));
    note(gen.value(v, "betweenness"), oracle::betweenness(pd, v, all_pairs));
  }

  const int k = part.n_communities;
  std::vector<char> assigned(static_cast<std::size_t>(p), 0);
  for (int u = 0; u < p; ++u) assigned[static_cast<std::size_t>(u)] = part.assigned(u);
  std::vector<std::vector<char>> cross(static_cast<std::size_t>(p),
                                       std::vector<char>(static_cast<std::size_t>(p), 0));
  for (int s = 0; s < p; ++s) {
    for (int t = 0; t < p; ++t) {
      cross[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
          part.assigned(s) && part.assigned(t) && part.assignment[s] != part.assignment[t];
    }
  }

  if (k >= 2) {
    IndexTable bridge = mixnet::bridge_indices(W, S, part);
    for (int v = 0; v < p; ++v) {
      if (!part.assigned(v)) continue;
      std::vector<char> other(static_cast<std::size_t>(p), 0);
      for (int u = 0; u < p; ++u) {
        other[static_cast<std::size_t>(u)] =
            part.assigned(u) && part.assignment[u] != part.assignment[v];
      }
      note(bridge.value(v, "bridge_strength"), oracle::abs_sum(W, v, other));
      note(bridge.value(v, "bridge_ei1"), oracle::signed_sum(W, S, v, other));
      note(bridge.value(v, "bridge_ei2"), two_step_ei(W, S, v, other));
      note(bridge.value(v, "bridge_closeness"), oracle::closeness(pd, v, other));
      note(bridge.value(v, "bridge_betweenness"), oracle::betweenness(pd, v, cross));
    }
  }

  bool any_excluded = false;
  for (int v = 0; v < p; ++v) any_excluded |= !part.assigned(v);
  if (any_excluded && k >= 1) {
    IndexTable exc = mixnet::excluded_bridge_indices(W, S, part);
    for (int v = 0; v < p; ++v) {
      if (part.assigned(v)) continue;
      note(exc.value(v, "bridge_strength_excluded"), oracle::abs_sum(W, v, assigned));
      note(exc.value(v, "bridge_ei1_excluded"), oracle::signed_sum(W, S, v, assigned));
      note(exc.value(v, "bridge_ei2_excluded"), two_step_ei(W, S, v, assigned));
      note(exc.value(v, "bridge_closeness_excluded"), oracle::closeness(pd, v, assigned));
      if (k >= 2) {
        note(exc.value(v, "bridge_betweenness_excluded"), oracle::betweenness(pd, v, cross));
      }
    }
  }

  for (int v = 0; v < p; ++v) {
    const bool has_row = part.assigned(v) ? k >= 2 : k >= 1;
    if (!has_row) continue;
    mixnet::BridgeDecomposition dec = mixnet::find_bridge_communities(W, S, part, v);
    double st = 0.0, ei = 0.0;
    for (const auto& c : dec.contributions) {
      st += c.strength;
      ei += c.ei1;
    }
    err.additivity = std::max(err.additivity, std::abs(st - dec.strength_total));
    err.additivity = std::max(err.additivity, std::abs(ei - dec.ei1_total));
  }
  return err;
}

// Interlayer table vs the oracle run on the between-layer-only subgraph.
inline double compare_interlayer(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                                 const std::vector<int>& node_layer,
                                 const std::vector<std::string>& labels) {
  const int p = static_cast<int>(W.rows());
  Eigen::MatrixXd Wi = W;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (node_layer[static_cast<std::size_t>(i)] == node_layer[static_cast<std::size_t>(j)]) {
        Wi(i, j) = 0.0;
      }
    }
  }
  const oracle::PathData pd = oracle::enumerate_paths(Wi);
  const std::vector<char> all(static_cast<std::size_t>(p), 1);
  const std::vector<std::vector<char>> all_pairs(static_cast<std::size_t>(p),
                                                 std::vector<char>(static_cast<std::size_t>(p), 1));
  mixnet::IndexTable t = mixnet::interlayer_indices(W, S, node_layer, labels);
  double worst = 0.0;
  auto note = [&worst](double lib, double ref) {
    worst = std::max(worst, std::abs(lib - ref));
  };
  for (int v = 0; v < p; ++v) {
    note(t.value(v, "interlayer_strength"), oracle::abs_sum(Wi, v, all));
    note(t.value(v, "interlayer_expected_influence"), oracle::signed_sum(Wi, S, v, all));
    note(t.value(v, "interlayer_closeness"), oracle::closeness(pd, v, all));
    note(t.value(v, "interlayer_betweenness"), oracle::betweenness(pd, v, all_pairs));
  }
  return worst;
}

}  // namespace acceptance_check

#include "mixnet/indices.hpp"

#include <limits>
#include <queue>
#include <set>
#include <utility>

#include "mixnet/errors.hpp"

namespace mixnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_graph(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S) {
  if (W.rows() != W.cols()) {
    throw EstimationError("indices: weight matrix must be square");
  }
  if (S.rows() != W.rows() || S.cols() != W.cols()) {
    throw EstimationError("indices: sign matrix shape must match the weight matrix");
  }
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      if (W(i, j) < 0.0) {
        throw EstimationError("indices: edge weights must be non-negative magnitudes");
      }
      if (j > i && W(i, j) != W(j, i)) {
        throw EstimationError("indices: weight matrix must be symmetric");
      }
    }
  }
}

// Sign multiplier for a signed sum. An undefined sign (0 on a present edge)
// counts as +1; callers flag the node via the `used_undefined` out-param.
double sign_mult(const Eigen::MatrixXi& S, int i, int j) {
  return S(i, j) < 0 ? -1.0 : 1.0;
}

struct Sssp {
  std::vector<double> dist;
  std::vector<double> sigma;             // number of tied shortest paths
  std::vector<std::vector<int>> preds;   // predecessors on those paths
  std::vector<int> order;                // settle order (ascending distance)
};

// Dijkstra over edge lengths 1/w with tie-aware path counting.
Sssp shortest_paths(const Eigen::MatrixXd& W, int src) {
  const int n = static_cast<int>(W.rows());
  Sssp r;
  r.dist.assign(n, kInf);
  r.sigma.assign(n, 0.0);
  r.preds.assign(n, {});
  r.dist[src] = 0.0;
  r.sigma[src] = 1.0;

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  std::vector<char> settled(n, 0);
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    r.order.push_back(v);
    for (int u = 0; u < n; ++u) {
      if (u == v || settled[u] || W(v, u) <= 0.0) continue;
      const double nd = d + 1.0 / W(v, u);
      if (r.dist[u] < kInf && approx_equal_path(nd, r.dist[u])) {
        r.sigma[u] += r.sigma[v];
        r.preds[u].push_back(v);
      } else if (nd < r.dist[u]) {
        r.dist[u] = nd;
        r.sigma[u] = r.sigma[v];
        r.preds[u].assign(1, v);
        pq.push({nd, u});
      }
    }
  }
  return r;
}

// Brandes accumulation restricted to (source, target) pairs passing the
// predicates. Every pair set used here is symmetric, so each unordered pair
// is visited from both endpoints and the total is halved.
template <class SrcPred, class TgtPred>
Eigen::VectorXd betweenness_values(const Eigen::MatrixXd& W, SrcPred src_ok, TgtPred tgt_ok) {
  const int n = static_cast<int>(W.rows());
  Eigen::VectorXd bc = Eigen::VectorXd::Zero(n);
  std::vector<double> delta(n, 0.0);
  for (int s = 0; s < n; ++s) {
    if (!src_ok(s)) continue;
    const Sssp sp = shortest_paths(W, s);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (int k = static_cast<int>(sp.order.size()) - 1; k >= 0; --k) {
      const int w = sp.order[k];
      if (w == s) continue;
      const double credit = tgt_ok(s, w) ? 1.0 : 0.0;
      const double coef = (credit + delta[w]) / sp.sigma[w];
      for (int v : sp.preds[w]) {
        if (v != s) delta[v] += sp.sigma[v] * coef;
      }
      bc[w] += delta[w];
    }
  }
  return bc / 2.0;
}

template <class TgtPred>
double closeness_value(const Eigen::MatrixXd& W, int v, TgtPred is_target) {
  const Sssp sp = shortest_paths(W, v);
  const int n = static_cast<int>(W.rows());
  double total = 0.0;
  bool reachable = false;
  for (int t = 0; t < n; ++t) {
    if (t == v || !is_target(t)) continue;
    if (sp.dist[t] < kInf) {
      total += sp.dist[t];
      reachable = true;
    }
  }
  return reachable ? 1.0 / total : 0.0;
}

// Signed sum of v's edges to targets. Sets used_undefined when an edge with
// an undefined sign participates.
template <class TgtPred>
double signed_edge_sum(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S, int v,
                       TgtPred is_target, bool& used_undefined) {
  const int n = static_cast<int>(W.rows());
  double total = 0.0;
  for (int u = 0; u < n; ++u) {
    if (u == v || W(v, u) <= 0.0 || !is_target(u)) continue;
    if (S(v, u) == 0) used_undefined = true;
    total += sign_mult(S, v, u) * W(v, u);
  }
  return total;
}

double strength_value(const Eigen::MatrixXd& W, int v) {
  double total = 0.0;
  for (Eigen::Index u = 0; u < W.cols(); ++u) {
    if (static_cast<int>(u) != v) total += W(v, u);
  }
  return total;
}

// One-step neighbor propagation shared by bridge_ei2 and its excluded
// variant. `ei1` is the node's own cross-community signed sum; the target
// predicate describes which endpoints count for a neighbor's contribution
// (assigned and outside v's community, with the edge back to v excluded).
template <class OtherTgt>
double ei2_value(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S, int v, double ei1,
                 OtherTgt other_target, bool& used_undefined) {
  const int n = static_cast<int>(W.rows());
  double total = ei1;
  for (int u = 0; u < n; ++u) {
    if (u == v || W(v, u) <= 0.0) continue;
    bool inner_undefined = false;
    const double other = signed_edge_sum(
        W, S, u, [&](int t) { return t != v && other_target(t); }, inner_undefined);
    if (S(v, u) == 0 || inner_undefined) used_undefined = true;
    total += sign_mult(S, v, u) * W(v, u) * other;
  }
  return total;
}

void check_partition_size(const Partition& part, Eigen::Index n) {
  if (static_cast<Eigen::Index>(part.assignment.size()) != n) {
    throw EstimationError("indices: partition size must match the number of nodes");
  }
}

std::vector<int> sorted_flags(const std::set<int>& flags) {
  return std::vector<int>(flags.begin(), flags.end());
}

}  // namespace

double IndexTable::value(int node, const std::string& metric) const {
  for (const IndexRow& r : rows) {
    if (r.node == node && r.metric == metric) return r.value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

IndexTable general_indices(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                           const std::string& layer) {
  check_graph(W, S);
  const int n = static_cast<int>(W.rows());
  IndexTable table;
  std::set<int> flags;

  for (int v = 0; v < n; ++v) {
    table.rows.push_back({v, layer, "strength", strength_value(W, v)});
  }
  for (int v = 0; v < n; ++v) {
    bool undef = false;
    const double ei = signed_edge_sum(W, S, v, [](int) { return true; }, undef);
    if (undef) flags.insert(v);
    table.rows.push_back({v, layer, "expected_influence", ei});
  }
  for (int v = 0; v < n; ++v) {
    table.rows.push_back(
        {v, layer, "closeness", closeness_value(W, v, [](int) { return true; })});
  }
  const Eigen::VectorXd bc = betweenness_values(
      W, [](int) { return true; }, [](int, int) { return true; });
  for (int v = 0; v < n; ++v) {
    table.rows.push_back({v, layer, "betweenness", bc[v]});
  }
  table.flagged = sorted_flags(flags);
  return table;
}

IndexTable bridge_indices(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                          const Partition& part, const std::string& layer) {
  check_graph(W, S);
  check_partition_size(part, W.rows());
  if (part.n_communities < 2) {
    throw EstimationError("bridge indices require at least 2 communities");
  }
  const int n = static_cast<int>(W.rows());
  const auto& comm = part.assignment;
  IndexTable table;
  std::set<int> flags;

  auto cross_target = [&](int v) {
    return [&, v](int t) { return comm[t] > 0 && comm[t] != comm[v]; };
  };

  for (int v = 0; v < n; ++v) {
    if (comm[v] <= 0) continue;
    double total = 0.0;
    for (int u = 0; u < n; ++u) {
      if (u != v && comm[u] > 0 && comm[u] != comm[v]) total += W(v, u);
    }
    table.rows.push_back({v, layer, "bridge_strength", total});
  }
  for (int v = 0; v < n; ++v) {
    if (comm[v] <= 0) continue;
    bool undef = false;
    const double ei1 = signed_edge_sum(W, S, v, cross_target(v), undef);
    if (undef) flags.insert(v);
    table.rows.push_back({v, layer, "bridge_ei1", ei1});
  }
  for (int v = 0; v < n; ++v) {
    if (comm[v] <= 0) continue;
    bool undef = false;
    const double ei1 = signed_edge_sum(W, S, v, cross_target(v), undef);
    const double ei2 = ei2_value(W, S, v, ei1, cross_target(v), undef);
    if (undef) flags.insert(v);
    table.rows.push_back({v, layer, "bridge_ei2", ei2});
  }
  for (int v = 0; v < n; ++v) {
    if (comm[v] <= 0) continue;
    table.rows.push_back(
        {v, layer, "bridge_closeness", closeness_value(W, v, cross_target(v))});
  }
  const Eigen::VectorXd bc = betweenness_values(
      W, [&](int s) { return comm[s] > 0; },
      [&](int s, int t) { return comm[t] > 0 && comm[t] != comm[s]; });
  for (int v = 0; v < n; ++v) {
    if (comm[v] <= 0) continue;
    table.rows.push_back({v, layer, "bridge_betweenness", bc[v]});
  }
  table.flagged = sorted_flags(flags);
  return table;
}

IndexTable excluded_bridge_indices(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                                   const Partition& part, const std::string& layer) {
  check_graph(W, S);
  check_partition_size(part, W.rows());
  const int n = static_cast<int>(W.rows());
  const auto& comm = part.assignment;

  bool any_excluded = false;
  for (int v = 0; v < n; ++v) {
    if (comm[v] == 0) any_excluded = true;
  }
  IndexTable table;
  if (!any_excluded) return table;
  if (part.n_communities < 1) {
    throw EstimationError("excluded bridge indices require at least 1 community");
  }

  std::set<int> flags;
  auto assigned_target = [&](int t) { return comm[t] > 0; };

  for (int v = 0; v < n; ++v) {
    if (comm[v] != 0) continue;
    double total = 0.0;
    for (int u = 0; u < n; ++u) {
      if (u != v && comm[u] > 0) total += W(v, u);
    }
    table.rows.push_back({v, layer, "bridge_strength_excluded", total});
  }
  for (int v = 0; v < n; ++v) {
    if (comm[v] != 0) continue;
    bool undef = false;
    const double ei1 = signed_edge_sum(W, S, v, assigned_target, undef);
    if (undef) flags.insert(v);
    table.rows.push_back({v, layer, "bridge_ei1_excluded", ei1});
  }
  for (int v = 0; v < n; ++v) {
    if (comm[v] != 0) continue;
    bool undef = false;
    const double ei1 = signed_edge_sum(W, S, v, assigned_target, undef);
    const double ei2 = ei2_value(W, S, v, ei1, assigned_target, undef);
    if (undef) flags.insert(v);
    table.rows.push_back({v, layer, "bridge_ei2_excluded", ei2});
  }
  for (int v = 0; v < n; ++v) {
    if (comm[v] != 0) continue;
    table.rows.push_back(
        {v, layer, "bridge_closeness_excluded", closeness_value(W, v, assigned_target)});
  }
  if (part.n_communities >= 2) {
    const Eigen::VectorXd bc = betweenness_values(
        W, [&](int s) { return comm[s] > 0; },
        [&](int s, int t) { return comm[t] > 0 && comm[t] != comm[s]; });
    for (int v = 0; v < n; ++v) {
      if (comm[v] != 0) continue;
      table.rows.push_back({v, layer, "bridge_betweenness_excluded", bc[v]});
    }
  }
  table.flagged = sorted_flags(flags);
  return table;
}

IndexTable interlayer_indices(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                              const std::vector<int>& node_layer,
                              const std::vector<std::string>& layer_labels) {
  check_graph(W, S);
  const int n = static_cast<int>(W.rows());
  if (static_cast<int>(node_layer.size()) != n) {
    throw EstimationError("indices: node-to-layer map must cover every node");
  }
  for (int v = 0; v < n; ++v) {
    if (node_layer[v] < 0 || node_layer[v] >= static_cast<int>(layer_labels.size())) {
      throw EstimationError("indices: node assigned to an unknown layer");
    }
  }

  // Keep only edges that cross layers.
  Eigen::MatrixXd Wx = W;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (node_layer[i] == node_layer[j]) Wx(i, j) = 0.0;
    }
  }

  IndexTable table;
  std::set<int> flags;
  auto label = [&](int v) { return layer_labels[node_layer[v]]; };

  for (int v = 0; v < n; ++v) {
    table.rows.push_back({v, label(v), "interlayer_strength", strength_value(Wx, v)});
  }
  for (int v = 0; v < n; ++v) {
    bool undef = false;
    const double ei = signed_edge_sum(Wx, S, v, [](int) { return true; }, undef);
    if (undef) flags.insert(v);
    table.rows.push_back({v, label(v), "interlayer_expected_influence", ei});
  }
  for (int v = 0; v < n; ++v) {
    table.rows.push_back({v, label(v), "interlayer_closeness",
                          closeness_value(Wx, v, [](int) { return true; })});
  }
  const Eigen::VectorXd bc = betweenness_values(
      Wx, [](int) { return true; }, [](int, int) { return true; });
  for (int v = 0; v < n; ++v) {
    table.rows.push_back({v, label(v), "interlayer_betweenness", bc[v]});
  }
  table.flagged = sorted_flags(flags);
  return table;
}

BridgeDecomposition find_bridge_communities(const Eigen::MatrixXd& W, const Eigen::MatrixXi& S,
                                            const Partition& part, int node) {
  check_graph(W, S);
  check_partition_size(part, W.rows());
  const int n = static_cast<int>(W.rows());
  if (node < 0 || node >= n) {
    throw EstimationError("bridge decomposition: node index out of range");
  }
  const auto& comm = part.assignment;
  const bool excluded = comm[node] == 0;
  if (excluded) {
    if (part.n_communities < 1) {
      throw EstimationError("bridge decomposition requires at least 1 community");
    }
  } else if (part.n_communities < 2) {
    throw EstimationError("bridge decomposition requires at least 2 communities");
  }

  BridgeDecomposition out;
  out.node = node;
  out.excluded = excluded;
  for (int c = 1; c <= part.n_communities; ++c) {
    if (!excluded && c == comm[node]) continue;
    BridgeContribution contrib;
    contrib.community = c;
    for (int u = 0; u < n; ++u) {
      if (u == node || comm[u] != c || W(node, u) <= 0.0) continue;
      contrib.strength += W(node, u);
      contrib.ei1 += sign_mult(S, node, u) * W(node, u);
    }
    out.contributions.push_back(contrib);
  }
  // Totals are the sum of the listed contributions, so the decomposition is
  // additive to the last bit.
  for (const BridgeContribution& c : out.contributions) {
    out.strength_total += c.strength;
    out.ei1_total += c.ei1;
  }
  return out;
}

}  // namespace mixnet

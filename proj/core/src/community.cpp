#include "mixnet/community.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "mixnet/errors.hpp"
#include "mixnet/rng.hpp"

namespace mixnet {

namespace {

void check_weights(const Eigen::MatrixXd& W) {
  if (W.rows() != W.cols()) throw EstimationError("weight matrix must be square");
  for (int i = 0; i < W.rows(); ++i) {
    for (int j = 0; j < W.cols(); ++j) {
      if (W(i, j) < 0.0) throw EstimationError("community detection needs non-negative weights");
      if (W(i, j) != W(j, i)) throw EstimationError("weight matrix must be symmetric");
    }
  }
}

struct LGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;  // neighbor, weight (no self)
  std::vector<double> self;                              // self-loop weight (counted twice in degree)
  std::vector<double> strength;                          // 2*self + sum of incident weights
  double two_m = 0.0;
};

LGraph graph_from_matrix(const Eigen::MatrixXd& W) {
  LGraph g;
  g.n = static_cast<int>(W.rows());
  g.adj.resize(g.n);
  g.self.assign(g.n, 0.0);
  g.strength.assign(g.n, 0.0);
  for (int i = 0; i < g.n; ++i) {
    g.self[i] = W(i, i);
    for (int j = 0; j < g.n; ++j) {
      if (j == i || W(i, j) == 0.0) continue;
      g.adj[i].push_back({j, W(i, j)});
    }
  }
  for (int i = 0; i < g.n; ++i) {
    double s = 2.0 * g.self[i];
    for (auto& [j, w] : g.adj[i]) s += w;
    g.strength[i] = s;
    g.two_m += s;
  }
  return g;
}

double graph_modularity(const LGraph& g, const std::vector<int>& comm) {
  if (g.two_m == 0.0) return 0.0;
  std::map<int, double> sum_in, sum_tot;
  for (int i = 0; i < g.n; ++i) {
    sum_tot[comm[i]] += g.strength[i];
    sum_in[comm[i]] += 2.0 * g.self[i];
    for (auto& [j, w] : g.adj[i]) {
      if (comm[j] == comm[i]) sum_in[comm[i]] += w;
    }
  }
  double q = 0.0;
  for (auto& [c, tot] : sum_tot) {
    q += sum_in[c] / g.two_m - (tot / g.two_m) * (tot / g.two_m);
  }
  return q;
}

// One Louvain phase of local moves, starting from singletons or from the
// labels in `init` (refinement). Returns true if any node moved.
bool louvain_phase(const LGraph& g, CounterRng& rng, std::vector<int>& comm,
                   const std::vector<int>* init = nullptr) {
  comm.resize(g.n);
  for (int i = 0; i < g.n; ++i) comm[i] = init ? (*init)[i] : i;
  std::vector<double> sum_tot(g.n, 0.0);
  for (int i = 0; i < g.n; ++i) sum_tot[comm[i]] += g.strength[i];

  auto order = rng.permutation(g.n);
  std::vector<double> k_ic(g.n, 0.0);
  bool any_move = false;
  bool improved = true;
  int guard = 0;
  while (improved) {
    improved = false;
    if (++guard > 1000) break;
    for (int idx = 0; idx < g.n; ++idx) {
      int i = order[idx];
      int c0 = comm[i];

      std::vector<int> touched;
      for (auto& [j, w] : g.adj[i]) {
        int c = comm[j];
        if (k_ic[c] == 0.0) touched.push_back(c);
        k_ic[c] += w;
      }
      if (k_ic[c0] == 0.0) touched.push_back(c0);
      std::sort(touched.begin(), touched.end());

      sum_tot[c0] -= g.strength[i];
      double best_gain = k_ic[c0] - sum_tot[c0] * g.strength[i] / g.two_m;
      int best_c = c0;
      for (int c : touched) {
        if (c == c0) continue;
        double gain = k_ic[c] - sum_tot[c] * g.strength[i] / g.two_m;
        if (gain > best_gain) {
          best_gain = gain;
          best_c = c;
        }
      }
      sum_tot[best_c] += g.strength[i];
      comm[i] = best_c;
      if (best_c != c0) {
        improved = true;
        any_move = true;
      }

      for (int c : touched) k_ic[c] = 0.0;
    }
  }
  return any_move;
}

// Collapses communities into super-nodes, keeping self-loops.
LGraph aggregate(const LGraph& g, const std::vector<int>& comm, std::vector<int>* relabel) {
  std::map<int, int> ids;
  relabel->assign(g.n, 0);
  for (int i = 0; i < g.n; ++i) {
    auto it = ids.find(comm[i]);
    if (it == ids.end()) it = ids.emplace(comm[i], static_cast<int>(ids.size())).first;
    (*relabel)[i] = it->second;
  }
  int k = static_cast<int>(ids.size());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < g.n; ++i) {
    W((*relabel)[i], (*relabel)[i]) += g.self[i];
    for (auto& [j, w] : g.adj[i]) {
      if (j < i) continue;  // each undirected edge once
      int a = (*relabel)[i];
      int b = (*relabel)[j];
      if (a == b) W(a, a) += w;
      else {
        W(a, b) += w;
        W(b, a) += w;
      }
    }
  }
  return graph_from_matrix(W);
}

Partition partition_from_labels(int n, const std::vector<int>& labels) {
  Partition part;
  part.assignment.assign(n, 0);
  part.excluded_reason.assign(n, "");
  std::map<int, int> renumber;
  for (int i = 0; i < n; ++i) {
    auto it = renumber.find(labels[i]);
    if (it == renumber.end()) it = renumber.emplace(labels[i], static_cast<int>(renumber.size()) + 1).first;
    part.assignment[i] = it->second;
  }
  part.n_communities = static_cast<int>(renumber.size());
  return part;
}

}  // namespace

std::vector<int> Partition::members(int community) const {
  std::vector<int> out;
  for (int i = 0; i < n(); ++i) {
    if (assignment[i] == community) out.push_back(i);
  }
  return out;
}

void renumber_partition(Partition& part) {
  std::map<int, int> renumber;
  for (int i = 0; i < part.n(); ++i) {
    if (part.assignment[i] <= 0) continue;
    auto it = renumber.find(part.assignment[i]);
    if (it == renumber.end()) {
      it = renumber.emplace(part.assignment[i], static_cast<int>(renumber.size()) + 1).first;
    }
    part.assignment[i] = it->second;
  }
  part.n_communities = static_cast<int>(renumber.size());
}

double modularity(const Eigen::MatrixXd& W, const Partition& part) {
  check_weights(W);
  if (W.rows() != part.n()) throw EstimationError("partition size does not match weight matrix");
  int n = part.n();
  double two_m = 0.0;
  std::vector<double> strength(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (!part.assigned(i)) continue;
    for (int j = 0; j < n; ++j) {
      if (!part.assigned(j) || j == i) continue;
      strength[i] += W(i, j);
    }
    two_m += strength[i];
  }
  if (two_m == 0.0) return 0.0;
  double q = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!part.assigned(i)) continue;
    for (int j = 0; j < n; ++j) {
      if (!part.assigned(j) || j == i) continue;
      if (part.assignment[i] == part.assignment[j]) {
        q += W(i, j) / two_m;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!part.assigned(i)) continue;
    for (int j = 0; j < n; ++j) {
      if (!part.assigned(j)) continue;
      if (part.assignment[i] == part.assignment[j]) {
        q -= (strength[i] / two_m) * (strength[j] / two_m);
      }
    }
  }
  return q;
}

Partition louvain(const Eigen::MatrixXd& W, std::uint64_t seed) {
  check_weights(W);
  const int n = static_cast<int>(W.rows());
  std::vector<int> best(n);
  for (int i = 0; i < n; ++i) best[i] = i;

  const LGraph g0 = graph_from_matrix(W);
  if (g0.two_m == 0.0) return partition_from_labels(n, best);

  // The greedy sweep can land in a local optimum whose basin depends on the
  // starting point, so several seeded runs compete and the labeling with the
  // highest modularity wins (earlier run kept on ties). The first run is the
  // classic singleton start; later ones begin from random labelings, which
  // reach optima that no sequence of single-node moves from singletons can.
  const int restarts = n <= 16 ? 40 : 10;
  double best_q = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng(derive_key(seed, 0x4c4f5556ULL + static_cast<std::uint64_t>(r)));
    std::vector<int> init;
    if (r > 0) {
      const int k_init = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
      init.resize(n);
      for (int i = 0; i < n; ++i) {
        init[i] = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(k_init)));
      }
    }
    const std::vector<int>* start = r > 0 ? &init : nullptr;
    // node_comm maps original nodes to current super-nodes across phases.
    std::vector<int> node_comm(n);
    for (int i = 0; i < n; ++i) node_comm[i] = i;
    LGraph g = g0;
    double q_prev = -std::numeric_limits<double>::infinity();
    for (;;) {
      std::vector<int> comm;
      louvain_phase(g, rng, comm, start);
      start = nullptr;
      double q_now = graph_modularity(g, comm);
      if (q_now - q_prev <= 1e-12) break;
      q_prev = q_now;
      std::vector<int> relabel;  // relabel[super-node] = its dense community id
      LGraph next = aggregate(g, comm, &relabel);
      for (int i = 0; i < n; ++i) node_comm[i] = relabel[node_comm[i]];
      if (next.n == g.n) break;
      g = std::move(next);
    }
    // final phase at the original resolution: aggregation cannot undo a bad
    // early merge, but single-node moves on the full graph can
    std::vector<int> polished;
    louvain_phase(g0, rng, polished, &node_comm);
    const double q = graph_modularity(g0, polished);
    if (q > best_q + 1e-12) {
      best_q = q;
      best = polished;
    }
  }
  return partition_from_labels(n, best);
}

Partition walktrap(const Eigen::MatrixXd& W, int steps) {
  check_weights(W);
  if (steps < 1) throw ConfigError("walktrap_steps must be at least 1");
  int n = static_cast<int>(W.rows());

  std::vector<double> strength(n, 0.0);
  std::vector<int> active;  // nodes with at least one edge
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i) strength[i] += W(i, j);
    }
    if (strength[i] > 0.0) active.push_back(i);
  }

  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i;
  if (active.empty()) return partition_from_labels(n, labels);

  int na = static_cast<int>(active.size());
  std::vector<int> pos(n, -1);
  for (int a = 0; a < na; ++a) pos[active[a]] = a;

  // t-step transition profiles of the walk restricted to active nodes.
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(na, na);
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < na; ++b) {
      if (a != b) P(a, b) = W(active[a], active[b]) / strength[active[a]];
    }
  }
  Eigen::MatrixXd Pt = P;
  for (int s = 1; s < steps; ++s) Pt = Pt * P;

  Eigen::VectorXd d(na);
  for (int a = 0; a < na; ++a) d[a] = strength[active[a]];

  // Agglomeration state; community ids are creation-ordered.
  struct Comm {
    bool alive = false;
    int size = 0;
    Eigen::VectorXd centroid;  // mean walk profile of members
    std::set<int> nbrs;
    std::vector<int> nodes;  // original node indices
  };
  std::vector<Comm> comms;
  comms.reserve(2 * na);
  for (int a = 0; a < na; ++a) {
    Comm c;
    c.alive = true;
    c.size = 1;
    c.centroid = Pt.row(a);
    c.nodes = {active[a]};
    comms.push_back(std::move(c));
  }
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < na; ++b) {
      if (a != b && W(active[a], active[b]) > 0.0) comms[a].nbrs.insert(b);
    }
  }

  auto delta_sigma = [&](const Comm& c1, const Comm& c2) {
    double r2 = 0.0;
    for (int k = 0; k < na; ++k) {
      double diff = c1.centroid[k] - c2.centroid[k];
      r2 += diff * diff / d[k];
    }
    return (static_cast<double>(c1.size) * c2.size / (c1.size + c2.size)) * r2;
  };

  // Zero merges is a valid answer; start from the singleton stage.
  double best_q = modularity(W, partition_from_labels(n, labels));
  std::vector<int> best_labels = labels;

  std::vector<int> comm_of(n, -1);
  for (int a = 0; a < na; ++a) comm_of[active[a]] = a;

  for (;;) {
    double best_d = std::numeric_limits<double>::infinity();
    int ba = -1, bb = -1;
    for (std::size_t a = 0; a < comms.size(); ++a) {
      if (!comms[a].alive) continue;
      for (int b : comms[a].nbrs) {
        if (b <= static_cast<int>(a) || !comms[b].alive) continue;
        double ds = delta_sigma(comms[a], comms[static_cast<std::size_t>(b)]);
        if (ds < best_d) {
          best_d = ds;
          ba = static_cast<int>(a);
          bb = b;
        }
      }
    }
    if (ba < 0) break;  // no adjacent pair left

    Comm merged;
    merged.alive = true;
    merged.size = comms[ba].size + comms[bb].size;
    merged.centroid = (comms[ba].centroid * comms[ba].size + comms[bb].centroid * comms[bb].size) /
                      merged.size;
    merged.nodes = comms[ba].nodes;
    merged.nodes.insert(merged.nodes.end(), comms[bb].nodes.begin(), comms[bb].nodes.end());
    for (int v : comms[ba].nbrs) {
      if (v != bb && comms[v].alive) merged.nbrs.insert(v);
    }
    for (int v : comms[bb].nbrs) {
      if (v != ba && comms[v].alive) merged.nbrs.insert(v);
    }
    int nid = static_cast<int>(comms.size());
    comms[ba].alive = false;
    comms[bb].alive = false;
    for (int v : merged.nbrs) {
      comms[v].nbrs.erase(ba);
      comms[v].nbrs.erase(bb);
      comms[v].nbrs.insert(nid);
    }
    for (int v : merged.nodes) comm_of[v] = nid;
    comms.push_back(std::move(merged));

    for (int i = 0; i < n; ++i) labels[i] = strength[i] > 0.0 ? comm_of[i] : i + 2 * na;
    double q = modularity(W, partition_from_labels(n, labels));
    if (q >= best_q) {
      best_q = q;
      best_labels = labels;
    }
  }

  return partition_from_labels(n, best_labels);
}

Partition detect(const Eigen::MatrixXd& W, const DetectOptions& opts, std::uint64_t seed) {
  check_weights(W);
  int n = static_cast<int>(W.rows());

  std::vector<char> excluded(n, 0);
  for (int i : opts.exclude) {
    if (i < 0 || i >= n) throw ConfigError("exclude_from_cluster index out of range");
    excluded[i] = 1;
  }

  std::vector<int> kept;
  for (int i = 0; i < n; ++i) {
    if (!excluded[i]) kept.push_back(i);
  }

  Partition part;
  part.assignment.assign(n, 0);
  part.excluded_reason.assign(n, "");
  for (int i = 0; i < n; ++i) {
    if (excluded[i]) part.excluded_reason[i] = "user";
  }

  if (!kept.empty()) {
    Eigen::MatrixXd sub(kept.size(), kept.size());
    for (std::size_t a = 0; a < kept.size(); ++a) {
      for (std::size_t b = 0; b < kept.size(); ++b) {
        sub(a, b) = W(kept[a], kept[b]);
      }
    }
    Partition sub_part;
    if (opts.method == "louvain") {
      sub_part = louvain(sub, seed);
    } else if (opts.method == "walktrap") {
      sub_part = walktrap(sub, opts.walktrap_steps);
    } else if (opts.method == "fast_greedy" || opts.method == "infomap" ||
               opts.method == "edge_betweenness") {
      throw ConfigError("community method '" + opts.method +
                        "' is recognized but not implemented; available: louvain, walktrap");
    } else {
      throw ConfigError("unknown community method '" + opts.method +
                        "'; available: louvain, walktrap");
    }
    for (std::size_t a = 0; a < kept.size(); ++a) {
      part.assignment[kept[a]] = sub_part.assignment[a];
    }
    if (opts.exclude_singletons) {
      std::vector<int> count(sub_part.n_communities + 1, 0);
      for (std::size_t a = 0; a < kept.size(); ++a) ++count[sub_part.assignment[a]];
      for (std::size_t a = 0; a < kept.size(); ++a) {
        if (count[sub_part.assignment[a]] == 1) {
          part.assignment[kept[a]] = 0;
          part.excluded_reason[kept[a]] = "singleton";
        }
      }
    }
  }

  renumber_partition(part);
  return part;
}

}  // namespace mixnet

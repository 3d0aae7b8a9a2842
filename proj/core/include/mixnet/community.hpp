#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace mixnet {

// Community labels over a fixed node set. assignment[i] is 1..K for
// assigned nodes and 0 for excluded ones, with the reason recorded.
// Community ids are numbered by first appearance in node order.
struct Partition {
  std::vector<int> assignment;
  std::vector<std::string> excluded_reason;  // empty string when assigned
  int n_communities = 0;

  int n() const { return static_cast<int>(assignment.size()); }
  bool assigned(int i) const { return assignment[i] > 0; }
  std::vector<int> members(int community) const;
};

// Renumbers communities 1..K by first appearance and recounts them.
void renumber_partition(Partition& part);

// Weighted Newman modularity over the assigned nodes; edges touching an
// excluded node are ignored. An edgeless (sub)graph scores 0.
double modularity(const Eigen::MatrixXd& W, const Partition& part);

// Two-phase Louvain on non-negative weights. Node visit order is a seeded
// permutation per phase; moves need a strictly positive modularity gain and
// equal-gain candidates resolve to the smallest community id. Phases stop
// when the aggregate modularity improves by 1e-12 or less.
Partition louvain(const Eigen::MatrixXd& W, std::uint64_t seed);

// Random-walk agglomeration: t-step walk profiles, Ward-style merges of
// adjacent communities, cut at the stage with maximal modularity (the last
// such stage when tied). Isolated nodes stay singletons.
Partition walktrap(const Eigen::MatrixXd& W, int steps = 4);

struct DetectOptions {
  std::string method = "louvain";
  int walktrap_steps = 4;
  std::vector<int> exclude;        // node indices excluded before detection
  bool exclude_singletons = true;  // single-node communities become excluded
};

// Runs the selected method on the subgraph of non-excluded nodes, applies
// the singleton policy, and renumbers by first appearance. Known method
// names that are not implemented are reported as such.
Partition detect(const Eigen::MatrixXd& W, const DetectOptions& opts, std::uint64_t seed);

}  // namespace mixnet

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixnet/bootstrap.hpp"
#include "mixnet/community.hpp"
#include "mixnet/data_model.hpp"
#include "mixnet/indices.hpp"
#include "mixnet/mgm.hpp"
#include "mixnet/model_config.hpp"
#include "mixnet/multilayer.hpp"

namespace mixnet {

// One layer's detection, index, and loading results. Node fields in the
// tables refer to network node indices (positions in net.node_names);
// partition and loadings rows follow the local order of `nodes`.
struct LayerResult {
  std::string label;
  std::vector<int> nodes;      // network node indices belonging to the layer
  Partition partition;         // over `nodes`
  IndexTable general;
  IndexTable bridge;           // empty when the layer has fewer than 2 communities
  IndexTable excluded;         // empty when the layer has no excluded nodes
  Eigen::MatrixXd loadings;    // |nodes| x n_communities
};

struct ReplicateFailure {
  int replicate = 0;
  std::string reason;
};

struct EdgeSummary {
  int i = 0;  // network node indices, i < j
  int j = 0;
  bool interlayer = false;
  BootSummary stats;
};

struct IndexSummary {
  std::string table;  // "general" | "bridge" | "excluded" | "interlayer"
  int node = 0;       // network node index
  std::string layer;
  std::string metric;
  BootSummary stats;
};

struct LoadingSummary {
  int node = 0;  // network node index
  std::string layer;
  int community = 0;  // original community id within the layer
  BootSummary stats;
};

struct LayerStability {
  std::string label;
  StabilityReport report;  // entry nodes are network node indices
};

struct FitResult {
  ModelConfig config;
  bool multilayer = false;
  int n_subjects = 0;
  std::vector<Variable> variables;  // training columns, network and covariates
  InferenceReport inference;
  ScalingReport scaling;  // raw-data statistics for every training column
  LayerSpec layers;

  NetworkFit net;
  std::vector<LayerResult> layer_results;
  IndexTable interlayer;  // multilayer fits only

  int boot_requested = 0;
  int boot_successful = 0;
  std::vector<ReplicateFailure> failures;
  std::vector<EdgeSummary> edge_summaries;  // every unordered node pair
  std::vector<IndexSummary> index_summaries;
  std::vector<LoadingSummary> loading_summaries;
  // Aligned per-replicate loadings [successful replicate][layer], each
  // |nodes| x n_communities of the original partition; community score
  // regions are recomputed from these.
  std::vector<std::vector<Eigen::MatrixXd>> replicate_loadings;
  std::vector<LayerStability> stability;
};

// Worker count for the bootstrap: the config value when positive, else the
// MIXNET_WORKERS environment variable, else 1.
int resolve_workers(const ModelConfig& cfg);

// Full pipeline: masked nodewise estimation, per-layer community detection,
// centrality indices, loadings, and (when reps > 0) the bootstrap with
// summaries and membership stability. Pass layers = nullptr for a
// single-layer fit; the result is identical to a one-layer specification.
FitResult fit_model(const Dataset& ds, const InferenceReport& inference, const ModelConfig& cfg,
                    const LayerInput* layers);

}  // namespace mixnet

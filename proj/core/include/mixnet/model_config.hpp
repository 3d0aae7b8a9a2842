#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixnet {

// Everything that controls estimation, detection, scoring and bootstrap.
// Defaults are the documented package defaults.
struct ModelConfig {
  // nodewise regressions
  std::vector<double> alphas = {1.0};
  int n_lambda = 50;
  double lambda_min_ratio = -1.0;  // <= 0 selects 0.01 (n > m) or 0.05
  std::string selection = "cv";    // "cv" | "ebic"
  int folds = 10;
  double ebic_gamma = 0.25;
  std::string edge_rule = "and";  // "and" | "or"
  bool scale_gaussian = true;
  std::uint64_t seed_model = 1;

  // community detection
  std::string cluster_method = "louvain";  // "louvain" | "walktrap"
  int walktrap_steps = 4;
  std::vector<std::string> exclude_from_cluster;
  bool exclude_singletons = true;

  std::vector<std::string> covariates;
  bool normalize_loadings = true;

  // bootstrap
  int boot_reps = 0;
  double quantile_level = 0.95;
  std::uint64_t seed_boot = 2;
  int workers = 0;  // 0: MIXNET_WORKERS environment variable, else 1
  double stability_cutoff = 0.7;
};

// Structural checks that do not need the dataset.
void validate_config(const ModelConfig& cfg);

}  // namespace mixnet

#include "mixnet/mgm.hpp"

#include <algorithm>
#include <cmath>

#include "mixnet/errors.hpp"

namespace mixnet {

namespace {

int columns_for(const Variable& v) {
  return v.kind == VariableKind::categorical ? v.n_levels() - 1 : 1;
}

void append_columns(const Dataset& ds, int ds_col, int node_index, Eigen::MatrixXd& X,
                    std::vector<int>& col_node, std::vector<int>& col_level, int* next) {
  const Variable& v = ds.variables[ds_col];
  if (v.kind == VariableKind::categorical) {
    for (int level = 1; level < v.n_levels(); ++level) {
      for (int r = 0; r < ds.n(); ++r) {
        X(r, *next) = ds.values(r, ds_col) == level ? 1.0 : 0.0;
      }
      col_node.push_back(node_index);
      col_level.push_back(level);
      ++(*next);
    }
  } else {
    X.col(*next) = ds.values.col(ds_col);
    col_node.push_back(node_index);
    col_level.push_back(-1);
    ++(*next);
  }
}

}  // namespace

void validate_config(const ModelConfig& cfg) {
  if (cfg.alphas.empty()) throw ConfigError("alpha grid is empty");
  for (double a : cfg.alphas) {
    if (a < 0.0 || a > 1.0) throw ConfigError("alpha must lie in [0, 1]");
  }
  if (cfg.n_lambda < 1) throw ConfigError("n_lambda must be at least 1");
  if (cfg.lambda_min_ratio > 0.0 && cfg.lambda_min_ratio >= 1.0) {
    throw ConfigError("lambda_min_ratio must lie in (0, 1)");
  }
  if (cfg.selection != "cv" && cfg.selection != "ebic") {
    throw ConfigError("unknown selection method '" + cfg.selection + "' (expected cv or ebic)");
  }
  if (cfg.folds < 2) throw ConfigError("folds must be at least 2");
  if (cfg.ebic_gamma < 0.0) throw ConfigError("ebic_gamma must be non-negative");
  if (cfg.edge_rule != "and" && cfg.edge_rule != "or") {
    throw ConfigError("unknown edge rule '" + cfg.edge_rule + "' (expected and or or)");
  }
  if (cfg.cluster_method == "fast_greedy" || cfg.cluster_method == "infomap" ||
      cfg.cluster_method == "edge_betweenness") {
    throw ConfigError("community method '" + cfg.cluster_method +
                      "' is recognized but not implemented; available: louvain, walktrap");
  }
  if (cfg.cluster_method != "louvain" && cfg.cluster_method != "walktrap") {
    throw ConfigError("unknown community method '" + cfg.cluster_method +
                      "'; available: louvain, walktrap");
  }
  if (cfg.walktrap_steps < 1) throw ConfigError("walktrap_steps must be at least 1");
  if (cfg.boot_reps < 0) throw ConfigError("boot_reps must be non-negative");
  if (cfg.quantile_level <= 0.0 || cfg.quantile_level >= 1.0) {
    throw ConfigError("quantile_level must lie in (0, 1)");
  }
  if (cfg.workers < 0) throw ConfigError("workers must be non-negative");
  if (cfg.stability_cutoff < 0.0 || cfg.stability_cutoff > 1.0) {
    throw ConfigError("stability_cutoff must lie in [0, 1]");
  }
}

DesignInfo build_design(const Dataset& ds, const std::vector<int>& node_cols,
                        const std::vector<int>& covariate_cols, int response_node,
                        const std::vector<char>& allowed) {
  int m = 0;
  for (std::size_t t = 0; t < node_cols.size(); ++t) {
    if (static_cast<int>(t) == response_node || !allowed[t]) continue;
    m += columns_for(ds.variables[node_cols[t]]);
  }
  for (int c : covariate_cols) m += columns_for(ds.variables[c]);
  if (m == 0) {
    throw EstimationError("node '" + ds.variables[node_cols[response_node]].name +
                          "': nothing to regress on (no allowed predictors or covariates)");
  }

  DesignInfo di;
  di.X.resize(ds.n(), m);
  di.col_node.reserve(m);
  di.col_level.reserve(m);
  int next = 0;
  for (std::size_t t = 0; t < node_cols.size(); ++t) {
    if (static_cast<int>(t) == response_node || !allowed[t]) continue;
    append_columns(ds, node_cols[t], static_cast<int>(t), di.X, di.col_node, di.col_level, &next);
  }
  for (int c : covariate_cols) {
    append_columns(ds, c, -1, di.X, di.col_node, di.col_level, &next);
  }
  return di;
}

NodewiseFit fit_node(const Dataset& ds, const std::vector<int>& node_cols,
                     const std::vector<int>& covariate_cols, int response_node,
                     const std::vector<char>& allowed, const ModelConfig& cfg) {
  DesignInfo di = build_design(ds, node_cols, covariate_cols, response_node, allowed);

  NodewiseFit fit;
  fit.node = response_node;
  fit.col_node = di.col_node;
  fit.col_level = di.col_level;
  fit.selection_method = cfg.selection;

  glm::Problem pb;
  pb.X = std::move(di.X);
  // Bootstrap resamples can leave a categorical level unobserved; its
  // all-zero indicator column then stays at coefficient zero instead of
  // aborting the replicate.
  pb.allow_constant_columns = true;
  const Variable& resp = ds.variables[node_cols[response_node]];
  switch (resp.kind) {
    case VariableKind::gaussian:
      pb.family = glm::Family::gaussian;
      pb.y = ds.values.col(node_cols[response_node]);
      break;
    case VariableKind::poisson:
      pb.family = glm::Family::poisson;
      pb.y = ds.values.col(node_cols[response_node]);
      break;
    case VariableKind::categorical: {
      pb.n_classes = resp.n_levels();
      pb.family = pb.n_classes == 2 ? glm::Family::binomial : glm::Family::multinomial;
      pb.classes.resize(ds.n());
      for (int r = 0; r < ds.n(); ++r) {
        pb.classes[r] = static_cast<int>(ds.values(r, node_cols[response_node]));
      }
      break;
    }
  }

  glm::SelectSpec spec;
  spec.method = cfg.selection;
  spec.folds = cfg.folds;
  spec.ebic_gamma = cfg.ebic_gamma;
  spec.seed = cfg.seed_model ^ static_cast<std::uint64_t>(response_node);
  spec.n_lambda = cfg.n_lambda;
  spec.min_ratio = cfg.lambda_min_ratio;

  glm::SelectionResult sel = glm::select_over_alphas(pb, cfg.alphas, spec);
  fit.lambda = sel.lambda;
  fit.alpha = sel.alpha;
  fit.criterion = sel.criterion;
  fit.coef = std::move(sel.coef);
  return fit;
}

double direction_magnitude(const NodewiseFit& fit, int t) {
  if (fit.coef.beta.size() == 0) return 0.0;
  double sum = 0.0;
  int count = 0;
  for (std::size_t c = 0; c < fit.col_node.size(); ++c) {
    if (fit.col_node[c] != t) continue;
    for (int k = 0; k < fit.coef.beta.rows(); ++k) {
      sum += std::abs(fit.coef.beta(k, static_cast<int>(c)));
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / count;
}

namespace {

// Sign of the single coefficient encoding direction s <- t. Only meaningful
// when neither endpoint is a 3+-level categorical.
int direction_sign(const NodewiseFit& fit, int t) {
  for (std::size_t c = 0; c < fit.col_node.size(); ++c) {
    if (fit.col_node[c] != t) continue;
    double b = fit.coef.beta(0, static_cast<int>(c));
    if (b > 0.0) return 1;
    if (b < 0.0) return -1;
    return 0;
  }
  return 0;
}

}  // namespace

EdgeAggregate aggregate_edges(const std::vector<NodewiseFit>& fits,
                              const std::vector<VariableKind>& node_kinds,
                              const std::string& rule, const Eigen::MatrixXi& allowed) {
  if (rule != "and" && rule != "or") {
    throw ConfigError("unknown edge rule '" + rule + "' (expected and or or)");
  }
  int p = static_cast<int>(fits.size());
  EdgeAggregate agg;
  agg.weights = Eigen::MatrixXd::Zero(p, p);
  agg.signs = Eigen::MatrixXi::Zero(p, p);

  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (allowed(i, j) == 0) continue;
      double m_ij = direction_magnitude(fits[i], j);  // i <- j
      double m_ji = direction_magnitude(fits[j], i);  // j <- i
      bool sel_ij = m_ij > 0.0;
      bool sel_ji = m_ji > 0.0;

      double w = 0.0;
      if (rule == "and") {
        if (sel_ij && sel_ji) w = 0.5 * (m_ij + m_ji);
      } else {
        if (sel_ij && sel_ji) w = 0.5 * (m_ij + m_ji);
        else if (sel_ij) w = m_ij;
        else if (sel_ji) w = m_ji;
      }
      if (w == 0.0) continue;

      agg.weights(i, j) = agg.weights(j, i) = w;

      int sign;
      bool multilevel = (node_kinds[i] == VariableKind::categorical) ||
                        (node_kinds[j] == VariableKind::categorical);
      // Binary categorical endpoints keep a signed single coefficient; only
      // 3+-level blocks lose sign information.
      bool signless = false;
      if (multilevel) {
        signless = fits[i].coef.beta.rows() > 1 || fits[j].coef.beta.rows() > 1;
        for (std::size_t c = 0; c < fits[i].col_node.size() && !signless; ++c) {
          if (fits[i].col_node[c] == j && fits[i].col_level[c] > 1) signless = true;
        }
        for (std::size_t c = 0; c < fits[j].col_node.size() && !signless; ++c) {
          if (fits[j].col_node[c] == i && fits[j].col_level[c] > 1) signless = true;
        }
      }
      if (signless) {
        sign = 1;
      } else if (sel_ij && sel_ji) {
        int s1 = direction_sign(fits[i], j);
        int s2 = direction_sign(fits[j], i);
        if (s1 == s2) {
          sign = s1;
        } else {
          sign = 0;
          agg.sign_conflicts.emplace_back(i, j);
        }
      } else {
        sign = sel_ij ? direction_sign(fits[i], j) : direction_sign(fits[j], i);
      }
      agg.signs(i, j) = agg.signs(j, i) = sign;
    }
  }
  return agg;
}

NetworkFit estimate_network_masked(const Dataset& ds, const ModelConfig& cfg,
                                   const Eigen::MatrixXi& allowed) {
  validate_config(cfg);
  auto node_cols = network_columns(ds, cfg.covariates);
  int p = static_cast<int>(node_cols.size());
  if (allowed.rows() != p || allowed.cols() != p) {
    throw EstimationError("allowed-pair mask does not match the node count");
  }
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (allowed(i, j) != allowed(j, i)) {
        throw EstimationError("allowed-pair mask must be symmetric");
      }
    }
  }

  std::vector<int> covariate_cols;
  for (const auto& name : cfg.covariates) covariate_cols.push_back(ds.column(name));

  Dataset work = standardize(ds, cfg.scale_gaussian);

  NetworkFit fit;
  fit.node_column = node_cols;
  for (int c : node_cols) {
    fit.node_names.push_back(ds.variables[c].name);
    fit.node_kinds.push_back(ds.variables[c].kind);
  }

  fit.nodewise.reserve(p);
  for (int s = 0; s < p; ++s) {
    std::vector<char> allowed_row(p, 0);
    for (int t = 0; t < p; ++t) allowed_row[t] = allowed(s, t) != 0 ? 1 : 0;
    fit.nodewise.push_back(fit_node(work, node_cols, covariate_cols, s, allowed_row, cfg));
  }

  EdgeAggregate agg = aggregate_edges(fit.nodewise, fit.node_kinds, cfg.edge_rule, allowed);
  fit.weights = std::move(agg.weights);
  fit.signs = std::move(agg.signs);
  fit.sign_conflicts = std::move(agg.sign_conflicts);
  return fit;
}

NetworkFit estimate_network(const Dataset& ds, const ModelConfig& cfg) {
  auto node_cols = network_columns(ds, cfg.covariates);
  int p = static_cast<int>(node_cols.size());
  return estimate_network_masked(ds, cfg, Eigen::MatrixXi::Ones(p, p));
}

}  // namespace mixnet

#include "mixnet/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "mixnet/errors.hpp"
#include "mixnet/rng.hpp"
#include "mixnet/scores.hpp"

namespace mixnet {
namespace {

constexpr std::uint64_t kDetectSalt = 0x4445544543ULL;

// Everything fit_once produces for one dataset (original or replicate).
struct CoreFit {
  NetworkFit net;
  std::vector<Subgraph> subs;
  std::vector<Partition> parts;          // local node order per layer
  std::vector<IndexTable> general;       // node fields are network indices
  std::vector<IndexTable> bridge;
  std::vector<IndexTable> excluded;
  std::vector<Eigen::MatrixXd> loadings;  // local rows x K_l
  IndexTable interlayer;
};

void remap_to_network_ids(IndexTable& table, const std::vector<int>& nodes) {
  for (IndexRow& r : table.rows) r.node = nodes[r.node];
  for (int& f : table.flagged) f = nodes[f];
}

CoreFit fit_once(const Dataset& ds, const ModelConfig& cfg, const LayerSpec& spec,
                 const Eigen::MatrixXi& mask, bool multilayer,
                 const std::vector<int>& exclude_nodes) {
  CoreFit cf;
  cf.net = estimate_network_masked(ds, cfg, mask);

  const int n_layers = spec.n_layers();
  cf.subs.reserve(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    Subgraph sub = layer_subgraph(cf.net.weights, cf.net.signs, spec, l);

    DetectOptions opts;
    opts.method = cfg.cluster_method;
    opts.walktrap_steps = cfg.walktrap_steps;
    opts.exclude_singletons = cfg.exclude_singletons;
    for (std::size_t a = 0; a < sub.nodes.size(); ++a) {
      for (int g : exclude_nodes) {
        if (sub.nodes[a] == g) opts.exclude.push_back(static_cast<int>(a));
      }
    }
    const std::uint64_t seed_l =
        derive_key(cfg.seed_model, kDetectSalt + static_cast<std::uint64_t>(l));
    Partition part = detect(sub.weights, opts, seed_l);

    const std::string& label = spec.labels[l];
    IndexTable general = general_indices(sub.weights, sub.signs, label);
    remap_to_network_ids(general, sub.nodes);

    IndexTable bridge;
    if (part.n_communities >= 2) {
      bridge = bridge_indices(sub.weights, sub.signs, part, label);
      remap_to_network_ids(bridge, sub.nodes);
    }
    IndexTable excluded;
    if (part.n_communities >= 1) {
      excluded = excluded_bridge_indices(sub.weights, sub.signs, part, label);
      remap_to_network_ids(excluded, sub.nodes);
    }
    Eigen::MatrixXd loadings;
    if (part.n_communities >= 1) {
      loadings = network_loadings(sub.weights, part, cfg.normalize_loadings);
    } else {
      loadings.resize(static_cast<Eigen::Index>(sub.nodes.size()), 0);
    }

    cf.general.push_back(std::move(general));
    cf.bridge.push_back(std::move(bridge));
    cf.excluded.push_back(std::move(excluded));
    cf.loadings.push_back(std::move(loadings));
    cf.parts.push_back(std::move(part));
    cf.subs.push_back(std::move(sub));
  }

  if (multilayer) {
    cf.interlayer = interlayer_indices(cf.net.weights, cf.net.signs, spec.node_layer, spec.labels);
  }
  return cf;
}

// Signed edge values: magnitude with the estimated sign, undefined signs
// counted positive (the same convention the indices use).
Eigen::MatrixXd signed_edges(const NetworkFit& net) {
  Eigen::MatrixXd e = net.weights;
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      if (net.signs(i, j) < 0) e(i, j) = -e(i, j);
    }
  }
  return e;
}

struct ReplicateRecord {
  bool ok = false;
  std::string reason;
  Eigen::MatrixXd edges;  // signed p x p
  std::vector<Partition> parts;
  std::vector<IndexTable> general;
  std::vector<IndexTable> bridge;
  std::vector<IndexTable> excluded;
  IndexTable interlayer;
  std::vector<Eigen::MatrixXd> loadings_aligned;  // local rows x K_orig
};

// Map a replicate's loadings onto the original community ids via
// maximum-agreement alignment; unmatched original communities get zeros.
Eigen::MatrixXd align_loadings(const Eigen::MatrixXd& rep_loadings, const Partition& orig,
                               const Partition& rep) {
  Eigen::MatrixXd aligned =
      Eigen::MatrixXd::Zero(rep_loadings.rows(), orig.n_communities);
  const std::vector<int> map = align_partition(orig, rep);
  for (int r = 1; r <= rep.n_communities; ++r) {
    const int c = map[r];
    if (c > 0) aligned.col(c - 1) = rep_loadings.col(r - 1);
  }
  return aligned;
}

}  // namespace

int resolve_workers(const ModelConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv("MIXNET_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

FitResult fit_model(const Dataset& ds, const InferenceReport& inference, const ModelConfig& cfg,
                    const LayerInput* layers) {
  validate_config(cfg);

  FitResult out;
  out.config = cfg;
  out.multilayer = layers != nullptr;
  out.n_subjects = ds.n();
  out.variables = ds.variables;
  out.inference = inference;
  standardize(ds, cfg.scale_gaussian, &out.scaling);

  const std::vector<int> node_cols = network_columns(ds, cfg.covariates);
  out.layers = out.multilayer ? validate_layers(ds, *layers, cfg.covariates)
                              : single_layer_spec(static_cast<int>(node_cols.size()));
  const Eigen::MatrixXi mask = build_mask(out.layers);

  // Clustering exclusions are named; resolve them to network node indices.
  std::vector<int> exclude_nodes;
  for (const std::string& name : cfg.exclude_from_cluster) {
    int found = -1;
    for (std::size_t j = 0; j < node_cols.size(); ++j) {
      if (ds.variables[node_cols[j]].name == name) found = static_cast<int>(j);
    }
    if (found < 0) {
      throw ConfigError("exclude_from_cluster: unknown node '" + name + "'");
    }
    exclude_nodes.push_back(found);
  }

  CoreFit original = fit_once(ds, cfg, out.layers, mask, out.multilayer, exclude_nodes);
  out.net = std::move(original.net);
  out.interlayer = std::move(original.interlayer);
  for (int l = 0; l < out.layers.n_layers(); ++l) {
    LayerResult lr;
    lr.label = out.layers.labels[l];
    lr.nodes = original.subs[l].nodes;
    lr.partition = std::move(original.parts[l]);
    lr.general = std::move(original.general[l]);
    lr.bridge = std::move(original.bridge[l]);
    lr.excluded = std::move(original.excluded[l]);
    lr.loadings = std::move(original.loadings[l]);
    out.layer_results.push_back(std::move(lr));
  }

  out.boot_requested = cfg.boot_reps;
  if (cfg.boot_reps <= 0) return out;

  // --- bootstrap replicates -------------------------------------------
  const int reps = cfg.boot_reps;
  std::vector<ReplicateRecord> recs(static_cast<std::size_t>(reps));
  std::atomic<int> next{0};

  auto run_replicate = [&](int r) {
    ReplicateRecord rec;
    Dataset draw;
    if (!resample_replicate(ds, cfg.seed_boot, r, &draw)) {
      rec.reason = "degenerate resample: a categorical column kept collapsing to one level";
      return rec;
    }
    try {
      CoreFit cf = fit_once(draw, cfg, out.layers, mask, out.multilayer, exclude_nodes);
      rec.edges = signed_edges(cf.net);
      rec.general = std::move(cf.general);
      rec.bridge = std::move(cf.bridge);
      rec.excluded = std::move(cf.excluded);
      rec.interlayer = std::move(cf.interlayer);
      for (int l = 0; l < out.layers.n_layers(); ++l) {
        rec.loadings_aligned.push_back(
            out.layer_results[l].partition.n_communities > 0
                ? align_loadings(cf.loadings[l], out.layer_results[l].partition, cf.parts[l])
                : Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cf.subs[l].nodes.size()), 0));
      }
      rec.parts = std::move(cf.parts);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.reason = e.what();
    } catch (...) {
      rec.reason = "unknown failure";
    }
    return rec;
  };

  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= reps) return;
      recs[static_cast<std::size_t>(r)] = run_replicate(r);
    }
  };

  const int n_workers = std::min(resolve_workers(cfg), reps);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // --- single-threaded summary pass ------------------------------------
  std::vector<const ReplicateRecord*> ok;
  for (int r = 0; r < reps; ++r) {
    if (recs[static_cast<std::size_t>(r)].ok) {
      ok.push_back(&recs[static_cast<std::size_t>(r)]);
    } else {
      out.failures.push_back({r, recs[static_cast<std::size_t>(r)].reason});
    }
  }
  out.boot_successful = static_cast<int>(ok.size());
  if (out.boot_successful == 0) {
    throw BootstrapError("bootstrap: every replicate failed (first failure: " +
                         out.failures.front().reason + ")");
  }
  if (static_cast<double>(out.failures.size()) > 0.2 * reps) {
    throw BootstrapError("bootstrap: " + std::to_string(out.failures.size()) + " of " +
                         std::to_string(reps) +
                         " replicates failed (more than 20%); summaries would be unreliable");
  }

  const double q = cfg.quantile_level;
  const Eigen::MatrixXd orig_edges = signed_edges(out.net);
  const int p = out.net.p();
  std::vector<double> values;
  values.reserve(ok.size());

  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      values.clear();
      for (const ReplicateRecord* rec : ok) values.push_back(rec->edges(i, j));
      EdgeSummary es;
      es.i = i;
      es.j = j;
      es.interlayer = out.multilayer && is_interlayer(out.layers, i, j);
      es.stats = summarize_replicates(out.net.node_names[i] + "--" + out.net.node_names[j],
                                      orig_edges(i, j), values, q);
      out.edge_summaries.push_back(std::move(es));
    }
  }

  auto summarize_table = [&](const std::string& table_name, const IndexTable& table,
                             auto replicate_table) {
    for (const IndexRow& row : table.rows) {
      values.clear();
      for (const ReplicateRecord* rec : ok) {
        const double v = replicate_table(*rec).value(row.node, row.metric);
        if (!std::isnan(v)) values.push_back(v);
      }
      if (values.empty()) continue;  // quantity never realized in a replicate
      IndexSummary is;
      is.table = table_name;
      is.node = row.node;
      is.layer = row.layer;
      is.metric = row.metric;
      is.stats = summarize_replicates(out.net.node_names[row.node] + "|" + row.metric, row.value,
                                      values, q);
      out.index_summaries.push_back(std::move(is));
    }
  };

  for (int l = 0; l < out.layers.n_layers(); ++l) {
    const LayerResult& lr = out.layer_results[l];
    summarize_table("general", lr.general,
                    [l](const ReplicateRecord& r) -> const IndexTable& { return r.general[l]; });
    summarize_table("bridge", lr.bridge,
                    [l](const ReplicateRecord& r) -> const IndexTable& { return r.bridge[l]; });
    summarize_table("excluded", lr.excluded,
                    [l](const ReplicateRecord& r) -> const IndexTable& { return r.excluded[l]; });
  }
  if (out.multilayer) {
    summarize_table("interlayer", out.interlayer,
                    [](const ReplicateRecord& r) -> const IndexTable& { return r.interlayer; });
  }

  for (int l = 0; l < out.layers.n_layers(); ++l) {
    const LayerResult& lr = out.layer_results[l];
    const int k = lr.partition.n_communities;
    for (std::size_t a = 0; a < lr.nodes.size(); ++a) {
      for (int c = 1; c <= k; ++c) {
        values.clear();
        for (const ReplicateRecord* rec : ok) {
          values.push_back(rec->loadings_aligned[l](static_cast<Eigen::Index>(a), c - 1));
        }
        LoadingSummary ls;
        ls.node = lr.nodes[a];
        ls.layer = lr.label;
        ls.community = c;
        ls.stats = summarize_replicates(
            out.net.node_names[lr.nodes[a]] + "::c" + std::to_string(c),
            lr.loadings(static_cast<Eigen::Index>(a), c - 1), values, q);
        out.loading_summaries.push_back(std::move(ls));
      }
    }
  }

  out.replicate_loadings.reserve(ok.size());
  for (const ReplicateRecord* rec : ok) {
    out.replicate_loadings.push_back(rec->loadings_aligned);
  }

  for (int l = 0; l < out.layers.n_layers(); ++l) {
    const LayerResult& lr = out.layer_results[l];
    std::vector<Partition> parts;
    parts.reserve(ok.size());
    for (const ReplicateRecord* rec : ok) parts.push_back(rec->parts[l]);
    LayerStability st;
    st.label = lr.label;
    st.report = membership_stability(lr.partition, parts, cfg.stability_cutoff);
    for (StabilityEntry& e : st.report.entries) e.node = lr.nodes[e.node];
    out.stability.push_back(std::move(st));
  }

  return out;
}

}  // namespace mixnet

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixnet/archive.hpp"
#include "mixnet/csv.hpp"
#include "mixnet/data_model.hpp"
#include "mixnet/errors.hpp"
#include "mixnet/graph_export.hpp"
#include "mixnet/multilayer.hpp"
#include "mixnet/pipeline.hpp"
#include "mixnet/run_config.hpp"
#include "mixnet/scores.hpp"

namespace {

using namespace mixnet;

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

int count_edges(const Eigen::MatrixXd& w) {
  int count = 0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
      if (w(i, j) > 0.0) ++count;
    }
  }
  return count;
}

// Overview banner mirroring the fitted-model print layout.
void print_fit(const FitResult& f, std::ostream& out) {
  out << "mixnet fit\n";
  out << "  Type: " << (f.multilayer ? "Multilayer MGM" : "Single layer MGM") << "\n";
  out << "  Data: " << f.n_subjects << " subjects x " << f.variables.size() << " variables\n";

  if (f.multilayer) {
    out << "  Layers (" << f.layers.n_layers() << "):\n";
    for (int l = 0; l < f.layers.n_layers(); ++l) {
      const LayerResult& lr = f.layer_results[l];
      out << "    - " << lr.label << ": " << lr.nodes.size() << " nodes, "
          << count_intralayer_edges(f.net.weights, f.layers, l) << " edges\n";
    }
    out << "  Interlayer edges:\n";
    for (int a = 0; a < f.layers.n_layers(); ++a) {
      for (int b = a + 1; b < f.layers.n_layers(); ++b) {
        if (f.layers.rules(a, b) != 1) continue;
        out << "    - " << layer_pair_key(f.layers, a, b) << ": "
            << count_interlayer_edges(f.net.weights, f.layers, a, b) << " edges\n";
      }
    }
  }

  out << "  Graph: " << f.net.p() << " nodes, " << count_edges(f.net.weights) << " edges\n";
  if (f.multilayer) {
    out << "  Communities per layer:\n";
    for (const LayerResult& lr : f.layer_results) {
      out << "    - " << lr.label << ": " << lr.partition.n_communities << "\n";
    }
  } else {
    out << "  Communities: " << f.layer_results.front().partition.n_communities << "\n";
  }
  if (!f.config.covariates.empty()) {
    out << "  Covariates (adjusted for): " << join(f.config.covariates, ", ") << "\n";
  }
  out << "  Community detection: " << f.config.cluster_method << "\n";
  if (f.boot_requested > 0) {
    out << "  Bootstrap replications: " << f.boot_requested << "\n";
    out << "  Bootstrapped quantities: "
        << (f.multilayer ? "general_index, interlayer_index, bridge_index, excluded_index, "
                           "community, loadings"
                         : "general_index, bridge_index, excluded_index, community, loadings")
        << "\n";
    if (!f.failures.empty()) {
      out << "  Failed replicates: " << f.failures.size() << " of " << f.boot_requested << "\n";
    }
  }
  if (!f.inference.categorical_inferred.empty()) {
    out << "  Data info:\n";
    out << "    - Inferred as 'c' (categorical): " << join(f.inference.categorical_inferred, ", ")
        << "\n";
  }
}

// ---------------------------------------------------------------------------
// summary rows

struct SummaryRow {
  std::string id;
  std::string layer;
  double estimated = 0.0;
  bool has_boot = false;
  double mean = 0.0, se = 0.0, lower = 0.0, upper = 0.0;
};

std::string three(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

void print_rows(const std::vector<SummaryRow>& rows, const std::string& id_header,
                std::ostream& out) {
  std::size_t idw = id_header.size(), lw = 5;
  for (const SummaryRow& r : rows) {
    idw = std::max(idw, r.id.size());
    lw = std::max(lw, r.layer.size());
  }
  const bool boot = std::any_of(rows.begin(), rows.end(),
                                [](const SummaryRow& r) { return r.has_boot; });
  out << "  " << std::setw(static_cast<int>(idw)) << id_header << "  " << std::setw(static_cast<int>(lw))
      << "layer" << "  " << std::setw(10) << "estimated";
  if (boot) {
    out << "  " << std::setw(10) << "mean" << "  " << std::setw(10) << "se" << "  " << std::setw(10)
        << "lower" << "  " << std::setw(10) << "upper";
  }
  out << "\n";
  for (const SummaryRow& r : rows) {
    out << "  " << std::setw(static_cast<int>(idw)) << r.id << "  "
        << std::setw(static_cast<int>(lw)) << r.layer << "  " << std::setw(10)
        << three(r.estimated);
    if (boot) {
      if (r.has_boot) {
        out << "  " << std::setw(10) << three(r.mean) << "  " << std::setw(10) << three(r.se)
            << "  " << std::setw(10) << three(r.lower) << "  " << std::setw(10) << three(r.upper);
      } else {
        out << "  " << std::setw(10) << "-" << "  " << std::setw(10) << "-" << "  " << std::setw(10)
            << "-" << "  " << std::setw(10) << "-";
      }
    }
    out << "\n";
  }
}

void write_rows_csv(const std::vector<SummaryRow>& rows, const std::string& id_header,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("summary: cannot write '" + path + "'");
  out << id_header << ",layer,estimated,mean,se,lower,upper,n\n";
  for (const SummaryRow& r : rows) {
    out << csv_escape(r.id) << ',' << csv_escape(r.layer) << ',' << format_double(r.estimated);
    if (r.has_boot) {
      out << ',' << format_double(r.mean) << ',' << format_double(r.se) << ','
          << format_double(r.lower) << ',' << format_double(r.upper);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

// Per-node layer labels and community, resolved once.
std::vector<std::string> node_layer_labels(const FitResult& f) {
  std::vector<std::string> labels(static_cast<std::size_t>(f.net.p()));
  for (const LayerResult& lr : f.layer_results) {
    for (int g : lr.nodes) labels[static_cast<std::size_t>(g)] = lr.label;
  }
  return labels;
}

std::vector<SummaryRow> edge_rows(const FitResult& f, bool interlayer) {
  const std::vector<std::string> labels = node_layer_labels(f);
  auto edge_layer = [&](int i, int j) {
    if (labels[i] == labels[j]) return labels[i];
    const int a = f.layers.layer_index(labels[i]);
    const int b = f.layers.layer_index(labels[j]);
    return layer_pair_key(f.layers, a, b);
  };

  std::vector<SummaryRow> rows;
  if (!f.edge_summaries.empty()) {
    for (const EdgeSummary& es : f.edge_summaries) {
      if (es.interlayer != interlayer) continue;
      if (es.stats.estimated == 0.0 && es.stats.boot_mean == 0.0 && es.stats.boot_se == 0.0) {
        continue;  // never-present edge; zeros carry no information here
      }
      SummaryRow r;
      r.id = es.stats.id;
      r.layer = edge_layer(es.i, es.j);
      r.estimated = es.stats.estimated;
      r.has_boot = true;
      r.mean = es.stats.boot_mean;
      r.se = es.stats.boot_se;
      r.lower = es.stats.lower;
      r.upper = es.stats.upper;
      rows.push_back(std::move(r));
    }
    return rows;
  }
  for (int i = 0; i < f.net.p(); ++i) {
    for (int j = i + 1; j < f.net.p(); ++j) {
      if (f.net.weights(i, j) <= 0.0) continue;
      const bool inter = f.multilayer && is_interlayer(f.layers, i, j);
      if (inter != interlayer) continue;
      SummaryRow r;
      r.id = f.net.node_names[i] + "--" + f.net.node_names[j];
      r.layer = edge_layer(i, j);
      r.estimated = f.net.signs(i, j) < 0 ? -f.net.weights(i, j) : f.net.weights(i, j);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::vector<SummaryRow> index_rows(const FitResult& f, bool interlayer,
                                   const std::string& statistics) {
  auto keep = [&](const std::string& table, const std::string& metric) {
    if (statistics.empty()) return true;
    return table == statistics || metric == statistics;
  };
  std::vector<SummaryRow> rows;
  if (!f.index_summaries.empty()) {
    for (const IndexSummary& is : f.index_summaries) {
      if ((is.table == "interlayer") != interlayer) continue;
      if (!keep(is.table, is.metric)) continue;
      SummaryRow r;
      r.id = f.net.node_names[is.node] + "|" + is.metric;
      r.layer = is.layer;
      r.estimated = is.stats.estimated;
      r.has_boot = true;
      r.mean = is.stats.boot_mean;
      r.se = is.stats.boot_se;
      r.lower = is.stats.lower;
      r.upper = is.stats.upper;
      rows.push_back(std::move(r));
    }
    return rows;
  }
  auto add_table = [&](const IndexTable& t, const std::string& table) {
    for (const IndexRow& row : t.rows) {
      if (!keep(table, row.metric)) continue;
      SummaryRow r;
      r.id = f.net.node_names[row.node] + "|" + row.metric;
      r.layer = row.layer;
      r.estimated = row.value;
      rows.push_back(std::move(r));
    }
  };
  if (interlayer) {
    add_table(f.interlayer, "interlayer");
  } else {
    for (const LayerResult& lr : f.layer_results) {
      add_table(lr.general, "general");
      add_table(lr.bridge, "bridge");
      add_table(lr.excluded, "excluded");
    }
  }
  return rows;
}

int cmd_summary(const std::string& archive_path, const std::string& what,
                const std::string& statistics, int top_n, const std::string& csv_path) {
  const Archive a = load_archive(archive_path);
  const FitResult& f = a.fit;

  std::vector<SummaryRow> rows;
  std::string title, id_header;
  if (what == "edges") {
    rows = edge_rows(f, false);
    title = "Intralayer edges:";
    id_header = "edge";
  } else if (what == "interlayer_edges") {
    if (!f.multilayer) throw DataError("summary: single-layer archives have no interlayer edges");
    rows = edge_rows(f, true);
    title = "Interlayer edges:";
    id_header = "edge";
  } else if (what == "indices") {
    rows = index_rows(f, false, statistics);
    title = "Node indices:";
    id_header = "index";
  } else if (what == "interlayer_indices") {
    if (!f.multilayer) {
      throw DataError("summary: single-layer archives have no interlayer indices");
    }
    rows = index_rows(f, true, statistics);
    title = "Interlayer indices:";
    id_header = "index";
  } else {
    throw ConfigError("summary: unknown table '" + what +
                      "' (use edges, indices, interlayer_edges, interlayer_indices)");
  }

  std::cout << title << "\n\n";
  if (top_n > 0) {
    std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& x, const SummaryRow& y) {
      return std::abs(x.estimated) > std::abs(y.estimated);
    });
    if (static_cast<int>(rows.size()) > top_n) rows.resize(static_cast<std::size_t>(top_n));
    std::cout << "    Showing top " << rows.size() << " rows (ranked by |estimated|)\n";
  }
  print_rows(rows, id_header, std::cout);
  if (!csv_path.empty()) {
    write_rows_csv(rows, id_header, csv_path);
    std::cout << "\nWrote " << csv_path << "\n";
  }
  return 0;
}

int cmd_stability(const std::string& archive_path, double cutoff_override,
                  const std::string& csv_path) {
  const Archive a = load_archive(archive_path);
  const FitResult& f = a.fit;
  if (f.stability.empty()) {
    throw DataError("stability: the archive has no stability report (fit with reps > 0)");
  }

  std::vector<std::string> unstable;
  std::ostringstream csv;
  csv << "node,layer,community,proportion,stable,cutoff\n";
  std::cout << "Membership stability (" << f.boot_successful << " successful replicates):\n\n";
  for (const LayerStability& st : f.stability) {
    const double cutoff = cutoff_override >= 0.0 ? cutoff_override : st.report.cutoff;
    const LayerResult* lr = nullptr;
    for (const LayerResult& cand : f.layer_results) {
      if (cand.label == st.label) lr = &cand;
    }
    for (const StabilityEntry& e : st.report.entries) {
      int community = 0;
      if (lr) {
        for (std::size_t aa = 0; aa < lr->nodes.size(); ++aa) {
          if (lr->nodes[aa] == e.node) community = lr->partition.assignment[aa];
        }
      }
      const bool stable = e.proportion >= cutoff;
      std::cout << "  " << std::setw(16) << f.net.node_names[e.node] << "  layer " << st.label
                << "  community " << community << "  " << three(e.proportion)
                << (stable ? "" : "  (below cutoff)") << "\n";
      csv << csv_escape(f.net.node_names[e.node]) << ',' << csv_escape(st.label) << ','
          << community << ',' << format_double(e.proportion) << ',' << (stable ? 1 : 0) << ','
          << format_double(cutoff) << '\n';
      if (!stable) unstable.push_back(f.net.node_names[e.node]);
    }
  }
  if (!unstable.empty()) {
    std::cout << "\nNodes below the stability cutoff: " << join(unstable, ", ") << "\n";
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw DataError("stability: cannot write '" + csv_path + "'");
    out << csv.str();
    std::cout << "\nWrote " << csv_path << "\n";
  }
  return 0;
}

int cmd_scores(const std::string& archive_path, const std::string& data_path,
               double quantile_level, const std::string& out_dir) {
  const Archive a = load_archive(archive_path);
  const FitResult& f = a.fit;

  RawTable raw;
  if (!data_path.empty()) {
    raw = read_csv(data_path);
  } else if (a.has_data) {
    raw = a.data;
  } else {
    throw DataError(
        "scores: no data available; pass --data or fit with save_data enabled");
  }
  const double q = quantile_level > 0.0 ? quantile_level : f.config.quantile_level;

  std::filesystem::create_directories(out_dir);
  const std::string scores_path = (std::filesystem::path(out_dir) / "scores.csv").string();
  const std::string loadings_path = (std::filesystem::path(out_dir) / "loadings.csv").string();

  std::ofstream scores_out(scores_path, std::ios::binary);
  if (!scores_out) throw DataError("scores: cannot write '" + scores_path + "'");

  struct LayerScore {
    const LayerResult* lr;
    Eigen::MatrixXd scores;                   // n x K
    std::vector<Eigen::MatrixXd> replicate;   // per successful replicate, n x K
  };
  std::vector<LayerScore> per_layer;
  for (std::size_t l = 0; l < f.layer_results.size(); ++l) {
    const LayerResult& lr = f.layer_results[l];
    if (lr.partition.n_communities < 1) continue;
    std::vector<NodeScoreSpec> spec;
    for (int g : lr.nodes) {
      const Variable& var = f.variables[static_cast<std::size_t>(f.net.node_column[g])];
      NodeScoreSpec s;
      s.name = var.name;
      s.kind = var.kind;
      s.levels = var.levels;
      s.mean = f.scaling.mean[static_cast<std::size_t>(f.net.node_column[g])];
      s.sd = f.scaling.sd[static_cast<std::size_t>(f.net.node_column[g])];
      spec.push_back(std::move(s));
    }
    LayerScore ls;
    ls.lr = &lr;
    const Eigen::MatrixXd z = standardized_node_values(raw, spec, lr.loadings, lr.partition);
    ls.scores = community_scores(z, lr.loadings);
    for (const auto& rep : f.replicate_loadings) {
      ls.replicate.push_back(community_scores(z, rep[l]));
    }
    per_layer.push_back(std::move(ls));
  }

  // scores.csv: one row per subject, one column set per (layer, community).
  scores_out << "subject";
  for (const LayerScore& ls : per_layer) {
    for (int c = 1; c <= ls.lr->partition.n_communities; ++c) {
      const std::string base = ls.lr->label + ".c" + std::to_string(c);
      scores_out << ',' << base;
      if (!ls.replicate.empty()) scores_out << ',' << base << ".lower," << base << ".upper";
    }
  }
  scores_out << '\n';
  const int n = raw.n_rows();
  std::vector<double> values;
  for (int i = 0; i < n; ++i) {
    scores_out << (i + 1);
    for (const LayerScore& ls : per_layer) {
      for (int c = 0; c < ls.lr->partition.n_communities; ++c) {
        scores_out << ',' << format_double(ls.scores(i, c));
        if (!ls.replicate.empty()) {
          values.clear();
          for (const Eigen::MatrixXd& rep : ls.replicate) values.push_back(rep(i, c));
          const auto [lo, hi] = quantile_region(values, q);
          scores_out << ',' << format_double(lo) << ',' << format_double(hi);
        }
      }
    }
    scores_out << '\n';
  }

  std::ofstream loadings_out(loadings_path, std::ios::binary);
  if (!loadings_out) throw DataError("scores: cannot write '" + loadings_path + "'");
  loadings_out << "node,layer,community,loading,mean,se,lower,upper\n";
  for (const LayerScore& ls : per_layer) {
    const LayerResult& lr = *ls.lr;
    for (std::size_t aa = 0; aa < lr.nodes.size(); ++aa) {
      for (int c = 1; c <= lr.partition.n_communities; ++c) {
        loadings_out << csv_escape(f.net.node_names[lr.nodes[aa]]) << ',' << csv_escape(lr.label)
                     << ',' << c << ','
                     << format_double(lr.loadings(static_cast<Eigen::Index>(aa), c - 1));
        const LoadingSummary* found = nullptr;
        for (const LoadingSummary& sum : f.loading_summaries) {
          if (sum.node == lr.nodes[aa] && sum.layer == lr.label && sum.community == c) {
            found = &sum;
          }
        }
        if (found) {
          loadings_out << ',' << format_double(found->stats.boot_mean) << ','
                       << format_double(found->stats.boot_se) << ','
                       << format_double(found->stats.lower) << ','
                       << format_double(found->stats.upper);
        } else {
          loadings_out << ",,,,";
        }
        loadings_out << '\n';
      }
    }
  }

  std::cout << "Wrote " << scores_path << " and " << loadings_path << "\n";
  return 0;
}

int cmd_export(const std::string& archive_path, const std::string& format,
               const std::string& out_path) {
  const Archive a = load_archive(archive_path);
  std::string content;
  if (format == "edgelist") {
    content = edge_list_csv(a.fit);
  } else if (format == "graphml") {
    content = graphml(a.fit);
  } else if (format == "dot") {
    content = dot(a.fit);
  } else {
    throw ConfigError("export: unknown format '" + format + "' (use edgelist, graphml, dot)");
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("export: cannot write '" + out_path + "'");
    out << content;
    std::cout << "Wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_fit(const std::string& config_path, const std::string& output_override) {
  RunConfig rc = load_run_config(config_path);
  if (rc.data_path.empty()) throw ConfigError("config: 'data' is required for fit");

  const RawTable raw = read_csv(rc.data_path);
  InferenceReport report;
  const Dataset ds = infer_types(raw, rc.type_overrides, &report);

  Archive a;
  a.fit = fit_model(ds, report, rc.model, rc.has_layers ? &rc.layers : nullptr);
  a.config = rc;
  if (rc.save_data) {
    a.has_data = true;
    a.data = dataset_to_raw(ds);
  }

  std::string out_path = output_override;
  if (out_path.empty()) {
    std::filesystem::create_directories(rc.output_dir);
    out_path = (std::filesystem::path(rc.output_dir) / "fit.json").string();
  }
  save_archive(a, out_path);

  print_fit(a.fit, std::cout);
  std::cout << "\nArchive written to: " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed graphical model networks: estimation, communities, bootstrap"};
  app.require_subcommand(1);

  std::string config_path, fit_output;
  CLI::App* fit = app.add_subcommand("fit", "Estimate a network from a configuration file");
  fit->add_option("-c,--config", config_path, "Run configuration (JSON)")->required();
  fit->add_option("-o,--output", fit_output, "Archive output path (default <output_dir>/fit.json)");

  std::string s_archive, s_what = "edges", s_statistics, s_csv;
  int s_top_n = 0;
  CLI::App* summary = app.add_subcommand("summary", "Tabulate estimates and bootstrap regions");
  summary->add_option("archive", s_archive, "Fit archive")->required();
  summary->add_option("-w,--what", s_what,
                      "edges | indices | interlayer_edges | interlayer_indices");
  summary->add_option("-s,--statistics", s_statistics,
                      "Filter indices by table (general, bridge, excluded) or metric name");
  summary->add_option("-n,--top-n", s_top_n, "Keep the top N rows by |estimated|");
  summary->add_option("--csv", s_csv, "Also write the table to a CSV file");

  std::string st_archive, st_csv;
  double st_cutoff = -1.0;
  CLI::App* stability = app.add_subcommand("stability", "Report community membership stability");
  stability->add_option("archive", st_archive, "Fit archive")->required();
  stability->add_option("--cutoff", st_cutoff, "Override the stability cutoff");
  stability->add_option("--csv", st_csv, "Also write the long-format table to a CSV file");

  std::string sc_archive, sc_data, sc_out = ".";
  double sc_quantile = -1.0;
  CLI::App* scores = app.add_subcommand("scores", "Compute subject-level community scores");
  scores->add_option("archive", sc_archive, "Fit archive")->required();
  scores->add_option("-d,--data", sc_data, "CSV of observations (default: data saved in archive)");
  scores->add_option("-q,--quantile-level", sc_quantile, "Coverage level for score regions");
  scores->add_option("-o,--out", sc_out, "Output directory for scores.csv and loadings.csv");

  std::string e_archive, e_format = "edgelist", e_out;
  CLI::App* exporter = app.add_subcommand("export", "Export the graph for downstream renderers");
  exporter->add_option("archive", e_archive, "Fit archive")->required();
  exporter->add_option("-f,--format", e_format, "edgelist | graphml | dot");
  exporter->add_option("-o,--out", e_out, "Output file ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) return cmd_fit(config_path, fit_output);
    if (summary->parsed()) return cmd_summary(s_archive, s_what, s_statistics, s_top_n, s_csv);
    if (stability->parsed()) return cmd_stability(st_archive, st_cutoff, st_csv);
    if (scores->parsed()) return cmd_scores(sc_archive, sc_data, sc_quantile, sc_out);
    if (exporter->parsed()) return cmd_export(e_archive, e_format, e_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

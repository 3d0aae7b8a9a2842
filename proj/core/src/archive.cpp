#include "mixnet/archive.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mixnet/errors.hpp"

namespace mixnet {
namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const std::string& what) {
  if (!rows.is_array()) throw DataError("archive: '" + what + "' must be an array of rows");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::Index m = 0;
  if (n > 0) {
    if (!rows[0].is_array()) throw DataError("archive: '" + what + "' rows must be arrays");
    m = static_cast<Eigen::Index>(rows[0].size());
  }
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
      throw DataError("archive: ragged rows in '" + what + "'");
    }
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return out;
}

json table_to_json(const IndexTable& t) {
  json out;
  json rows = json::array();
  for (const IndexRow& r : t.rows) rows.push_back(json::array({r.node, r.layer, r.metric, r.value}));
  out["rows"] = std::move(rows);
  out["flagged"] = t.flagged;
  return out;
}

IndexTable table_from_json(const json& j, const std::string& what) {
  IndexTable t;
  if (j.is_null()) return t;
  for (const json& r : j.at("rows")) {
    if (!r.is_array() || r.size() != 4) {
      throw DataError("archive: malformed index row in '" + what + "'");
    }
    t.rows.push_back({r[0].get<int>(), r[1].get<std::string>(), r[2].get<std::string>(),
                      r[3].get<double>()});
  }
  t.flagged = j.at("flagged").get<std::vector<int>>();
  return t;
}

json partition_to_json(const Partition& p) {
  json out;
  out["assignment"] = p.assignment;
  out["excluded_reason"] = p.excluded_reason;
  out["n_communities"] = p.n_communities;
  return out;
}

Partition partition_from_json(const json& j) {
  Partition p;
  p.assignment = j.at("assignment").get<std::vector<int>>();
  p.excluded_reason = j.at("excluded_reason").get<std::vector<std::string>>();
  p.n_communities = j.at("n_communities").get<int>();
  return p;
}

json stats_to_json(const BootSummary& s) {
  json out;
  out["id"] = s.id;
  out["estimated"] = s.estimated;
  out["mean"] = s.boot_mean;
  out["se"] = s.boot_se;
  out["lower"] = s.lower;
  out["upper"] = s.upper;
  out["n"] = s.n_used;
  return out;
}

BootSummary stats_from_json(const json& j) {
  BootSummary s;
  s.id = j.at("id").get<std::string>();
  s.estimated = j.at("estimated").get<double>();
  s.boot_mean = j.at("mean").get<double>();
  s.boot_se = j.at("se").get<double>();
  s.lower = j.at("lower").get<double>();
  s.upper = j.at("upper").get<double>();
  s.n_used = j.at("n").get<int>();
  return s;
}

}  // namespace

std::string archive_to_json(const Archive& a) {
  const FitResult& f = a.fit;
  json root;
  root["format"] = "mixnet-fit";
  root["version"] = Archive::kVersion;
  root["config"] = json::parse(run_config_to_json(a.config));
  root["multilayer"] = f.multilayer;
  root["n_subjects"] = f.n_subjects;

  json variables = json::array();
  for (const Variable& v : f.variables) {
    variables.push_back(
        {{"name", v.name}, {"kind", kind_name(v.kind)}, {"levels", v.levels}});
  }
  root["variables"] = std::move(variables);
  root["inference"] = {{"categorical_inferred", f.inference.categorical_inferred},
                       {"overridden", f.inference.overridden}};
  root["scaling"] = {{"mean", f.scaling.mean},
                     {"sd", f.scaling.sd},
                     {"scaled", std::vector<int>(f.scaling.scaled.begin(), f.scaling.scaled.end())}};

  json layers;
  layers["labels"] = f.layers.labels;
  layers["node_layer"] = f.layers.node_layer;
  json rules = json::array();
  for (Eigen::Index i = 0; i < f.layers.rules.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < f.layers.rules.cols(); ++j) row.push_back(f.layers.rules(i, j));
    rules.push_back(std::move(row));
  }
  layers["rules"] = std::move(rules);
  root["layers"] = std::move(layers);

  json network;
  json nodes = json::array();
  for (int i = 0; i < f.net.p(); ++i) {
    nodes.push_back({{"name", f.net.node_names[i]},
                     {"kind", kind_name(f.net.node_kinds[i])},
                     {"column", f.net.node_column[i]}});
  }
  network["nodes"] = std::move(nodes);
  json edges = json::array();
  for (int i = 0; i < f.net.p(); ++i) {
    for (int j = i + 1; j < f.net.p(); ++j) {
      if (f.net.weights(i, j) > 0.0) {
        edges.push_back(json::array({i, j, f.net.weights(i, j), f.net.signs(i, j)}));
      }
    }
  }
  network["edges"] = std::move(edges);
  json conflicts = json::array();
  for (const auto& [i, j] : f.net.sign_conflicts) conflicts.push_back(json::array({i, j}));
  network["sign_conflicts"] = std::move(conflicts);
  json nodewise = json::array();
  for (const NodewiseFit& nf : f.net.nodewise) {
    nodewise.push_back({{"node", nf.node},
                        {"lambda", nf.lambda},
                        {"alpha", nf.alpha},
                        {"criterion", nf.criterion},
                        {"method", nf.selection_method}});
  }
  network["nodewise"] = std::move(nodewise);
  root["network"] = std::move(network);

  json layer_results = json::array();
  for (const LayerResult& lr : f.layer_results) {
    json l;
    l["label"] = lr.label;
    l["nodes"] = lr.nodes;
    l["partition"] = partition_to_json(lr.partition);
    l["general"] = table_to_json(lr.general);
    l["bridge"] = table_to_json(lr.bridge);
    l["excluded"] = table_to_json(lr.excluded);
    l["loadings"] = matrix_to_json(lr.loadings);
    layer_results.push_back(std::move(l));
  }
  root["layer_results"] = std::move(layer_results);
  if (f.multilayer) root["interlayer"] = table_to_json(f.interlayer);

  if (f.boot_requested > 0) {
    json boot;
    boot["requested"] = f.boot_requested;
    boot["successful"] = f.boot_successful;
    json failures = json::array();
    for (const ReplicateFailure& fl : f.failures) {
      failures.push_back({{"replicate", fl.replicate}, {"reason", fl.reason}});
    }
    boot["failures"] = std::move(failures);
    json edge_stats = json::array();
    for (const EdgeSummary& es : f.edge_summaries) {
      json e = stats_to_json(es.stats);
      e["i"] = es.i;
      e["j"] = es.j;
      e["interlayer"] = es.interlayer;
      edge_stats.push_back(std::move(e));
    }
    boot["edges"] = std::move(edge_stats);
    json index_stats = json::array();
    for (const IndexSummary& is : f.index_summaries) {
      json e = stats_to_json(is.stats);
      e["table"] = is.table;
      e["node"] = is.node;
      e["layer"] = is.layer;
      e["metric"] = is.metric;
      index_stats.push_back(std::move(e));
    }
    boot["indices"] = std::move(index_stats);
    json loading_stats = json::array();
    for (const LoadingSummary& ls : f.loading_summaries) {
      json e = stats_to_json(ls.stats);
      e["node"] = ls.node;
      e["layer"] = ls.layer;
      e["community"] = ls.community;
      loading_stats.push_back(std::move(e));
    }
    boot["loadings"] = std::move(loading_stats);
    json rep_loadings = json::array();
    for (const auto& rep : f.replicate_loadings) {
      json per_layer = json::array();
      for (const Eigen::MatrixXd& m : rep) per_layer.push_back(matrix_to_json(m));
      rep_loadings.push_back(std::move(per_layer));
    }
    boot["replicate_loadings"] = std::move(rep_loadings);
    json stability = json::array();
    for (const LayerStability& st : f.stability) {
      json s;
      s["label"] = st.label;
      s["cutoff"] = st.report.cutoff;
      s["n_replicates"] = st.report.n_replicates;
      json entries = json::array();
      for (const StabilityEntry& e : st.report.entries) {
        entries.push_back(
            {{"node", e.node}, {"proportion", e.proportion}, {"stable", e.stable}});
      }
      s["entries"] = std::move(entries);
      stability.push_back(std::move(s));
    }
    boot["stability"] = std::move(stability);
    root["bootstrap"] = std::move(boot);
  }

  if (a.has_data) {
    json data;
    data["names"] = a.data.names;
    json rows = json::array();
    for (int r = 0; r < a.data.n_rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < a.data.n_cols(); ++c) {
        row.push_back(a.data.columns[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]);
      }
      rows.push_back(std::move(row));
    }
    data["rows"] = std::move(rows);
    root["data"] = std::move(data);
  }

  return root.dump(2);
}

Archive archive_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const std::exception& e) {
    throw DataError(std::string("archive: invalid JSON: ") + e.what());
  }
  try {
    if (root.value("format", std::string()) != "mixnet-fit") {
      throw DataError("archive: not a fit archive (missing format tag)");
    }
    if (root.at("version").get<int>() != Archive::kVersion) {
      throw DataError("archive: unsupported version " + root.at("version").dump());
    }

    Archive a;
    a.config = parse_run_config(root.at("config").dump());
    FitResult& f = a.fit;
    f.config = a.config.model;
    f.multilayer = root.at("multilayer").get<bool>();
    f.n_subjects = root.at("n_subjects").get<int>();

    for (const json& v : root.at("variables")) {
      Variable var;
      var.name = v.at("name").get<std::string>();
      var.kind = parse_kind(v.at("kind").get<std::string>());
      var.levels = v.at("levels").get<std::vector<std::string>>();
      f.variables.push_back(std::move(var));
    }
    f.inference.categorical_inferred =
        root.at("inference").at("categorical_inferred").get<std::vector<std::string>>();
    f.inference.overridden = root.at("inference").at("overridden").get<std::vector<std::string>>();
    f.scaling.mean = root.at("scaling").at("mean").get<std::vector<double>>();
    f.scaling.sd = root.at("scaling").at("sd").get<std::vector<double>>();
    for (int s : root.at("scaling").at("scaled").get<std::vector<int>>()) {
      f.scaling.scaled.push_back(static_cast<char>(s));
    }

    const json& layers = root.at("layers");
    f.layers.labels = layers.at("labels").get<std::vector<std::string>>();
    f.layers.node_layer = layers.at("node_layer").get<std::vector<int>>();
    const json& rules = layers.at("rules");
    const int nl = static_cast<int>(f.layers.labels.size());
    f.layers.rules.setZero(nl, nl);
    for (int i = 0; i < nl; ++i) {
      for (int j = 0; j < nl; ++j) {
        f.layers.rules(i, j) = rules.at(i).at(j).get<int>();
      }
    }

    const json& network = root.at("network");
    for (const json& nd : network.at("nodes")) {
      f.net.node_names.push_back(nd.at("name").get<std::string>());
      f.net.node_kinds.push_back(parse_kind(nd.at("kind").get<std::string>()));
      f.net.node_column.push_back(nd.at("column").get<int>());
    }
    const int p = f.net.p();
    f.net.weights = Eigen::MatrixXd::Zero(p, p);
    f.net.signs = Eigen::MatrixXi::Zero(p, p);
    for (const json& e : network.at("edges")) {
      const int i = e.at(0).get<int>();
      const int j = e.at(1).get<int>();
      const double w = e.at(2).get<double>();
      const int s = e.at(3).get<int>();
      f.net.weights(i, j) = f.net.weights(j, i) = w;
      f.net.signs(i, j) = f.net.signs(j, i) = s;
    }
    for (const json& c : network.at("sign_conflicts")) {
      f.net.sign_conflicts.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
    }
    for (const json& nf : network.at("nodewise")) {
      NodewiseFit nw;
      nw.node = nf.at("node").get<int>();
      nw.lambda = nf.at("lambda").get<double>();
      nw.alpha = nf.at("alpha").get<double>();
      nw.criterion = nf.at("criterion").get<double>();
      nw.selection_method = nf.at("method").get<std::string>();
      f.net.nodewise.push_back(std::move(nw));
    }

    for (const json& l : root.at("layer_results")) {
      LayerResult lr;
      lr.label = l.at("label").get<std::string>();
      lr.nodes = l.at("nodes").get<std::vector<int>>();
      lr.partition = partition_from_json(l.at("partition"));
      lr.general = table_from_json(l.at("general"), "general");
      lr.bridge = table_from_json(l.at("bridge"), "bridge");
      lr.excluded = table_from_json(l.at("excluded"), "excluded");
      lr.loadings = matrix_from_json(l.at("loadings"), "loadings");
      f.layer_results.push_back(std::move(lr));
    }
    if (f.multilayer) f.interlayer = table_from_json(root.at("interlayer"), "interlayer");

    if (root.contains("bootstrap")) {
      const json& boot = root.at("bootstrap");
      f.boot_requested = boot.at("requested").get<int>();
      f.boot_successful = boot.at("successful").get<int>();
      for (const json& fl : boot.at("failures")) {
        f.failures.push_back(
            {fl.at("replicate").get<int>(), fl.at("reason").get<std::string>()});
      }
      for (const json& e : boot.at("edges")) {
        EdgeSummary es;
        es.i = e.at("i").get<int>();
        es.j = e.at("j").get<int>();
        es.interlayer = e.at("interlayer").get<bool>();
        es.stats = stats_from_json(e);
        f.edge_summaries.push_back(std::move(es));
      }
      for (const json& e : boot.at("indices")) {
        IndexSummary is;
        is.table = e.at("table").get<std::string>();
        is.node = e.at("node").get<int>();
        is.layer = e.at("layer").get<std::string>();
        is.metric = e.at("metric").get<std::string>();
        is.stats = stats_from_json(e);
        f.index_summaries.push_back(std::move(is));
      }
      for (const json& e : boot.at("loadings")) {
        LoadingSummary ls;
        ls.node = e.at("node").get<int>();
        ls.layer = e.at("layer").get<std::string>();
        ls.community = e.at("community").get<int>();
        ls.stats = stats_from_json(e);
        f.loading_summaries.push_back(std::move(ls));
      }
      for (const json& rep : boot.at("replicate_loadings")) {
        std::vector<Eigen::MatrixXd> per_layer;
        for (const json& m : rep) per_layer.push_back(matrix_from_json(m, "replicate_loadings"));
        f.replicate_loadings.push_back(std::move(per_layer));
      }
      for (const json& s : boot.at("stability")) {
        LayerStability st;
        st.label = s.at("label").get<std::string>();
        st.report.cutoff = s.at("cutoff").get<double>();
        st.report.n_replicates = s.at("n_replicates").get<int>();
        for (const json& e : s.at("entries")) {
          st.report.entries.push_back({e.at("node").get<int>(), e.at("proportion").get<double>(),
                                       e.at("stable").get<bool>()});
        }
        f.stability.push_back(std::move(st));
      }
    }

    if (root.contains("data")) {
      a.has_data = true;
      const json& data = root.at("data");
      a.data.names = data.at("names").get<std::vector<std::string>>();
      a.data.columns.assign(a.data.names.size(), {});
      for (const json& row : data.at("rows")) {
        if (row.size() != a.data.names.size()) throw DataError("archive: ragged data rows");
        for (std::size_t c = 0; c < a.data.names.size(); ++c) {
          a.data.columns[c].push_back(row.at(c).get<std::string>());
        }
      }
    }
    return a;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("archive: malformed document: ") + e.what());
  }
}

void save_archive(const Archive& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("archive: cannot write '" + path + "'");
  out << archive_to_json(a) << '\n';
  if (!out) throw DataError("archive: write to '" + path + "' failed");
}

Archive load_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("archive: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return archive_from_json(buf.str());
}

}  // namespace mixnet

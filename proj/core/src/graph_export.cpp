#include "mixnet/graph_export.hpp"

#include <sstream>

namespace mixnet {
namespace {

struct NodeContext {
  std::string layer;
  int community = 0;
  std::string excluded_reason;
};

// Per-node layer label, community id (0 = excluded) and exclusion reason.
std::vector<NodeContext> node_contexts(const FitResult& f) {
  std::vector<NodeContext> ctx(static_cast<std::size_t>(f.net.p()));
  for (const LayerResult& lr : f.layer_results) {
    for (std::size_t a = 0; a < lr.nodes.size(); ++a) {
      NodeContext& c = ctx[static_cast<std::size_t>(lr.nodes[a])];
      c.layer = lr.label;
      c.community = lr.partition.assignment[a];
      c.excluded_reason = lr.partition.excluded_reason[a];
    }
  }
  return ctx;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace

std::string edge_list_csv(const FitResult& f) {
  const std::vector<NodeContext> ctx = node_contexts(f);
  std::ostringstream out;
  out << "source,target,weight,sign,layer_source,layer_target,edge_type\n";
  const int p = f.net.p();
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (f.net.weights(i, j) <= 0.0) continue;
      const bool inter = ctx[i].layer != ctx[j].layer;
      out << csv_escape(f.net.node_names[i]) << ',' << csv_escape(f.net.node_names[j]) << ','
          << format_double(f.net.weights(i, j)) << ',' << f.net.signs(i, j) << ','
          << csv_escape(ctx[i].layer) << ',' << csv_escape(ctx[j].layer) << ','
          << (inter ? "inter" : "intra") << '\n';
    }
  }
  return out.str();
}

std::string graphml(const FitResult& f) {
  const std::vector<NodeContext> ctx = node_contexts(f);
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
      << "  <key id=\"layer\" for=\"node\" attr.name=\"layer\" attr.type=\"string\"/>\n"
      << "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n"
      << "  <key id=\"excluded_reason\" for=\"node\" attr.name=\"excluded_reason\""
         " attr.type=\"string\"/>\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      << "  <key id=\"sign\" for=\"edge\" attr.name=\"sign\" attr.type=\"int\"/>\n"
      << "  <graph id=\"network\" edgedefault=\"undirected\">\n";
  const int p = f.net.p();
  for (int i = 0; i < p; ++i) {
    out << "    <node id=\"n" << i << "\">\n"
        << "      <data key=\"kind\">" << kind_name(f.net.node_kinds[i]) << "</data>\n"
        << "      <data key=\"layer\">" << xml_escape(ctx[i].layer) << "</data>\n"
        << "      <data key=\"community\">" << ctx[i].community << "</data>\n"
        << "      <data key=\"excluded_reason\">" << xml_escape(ctx[i].excluded_reason)
        << "</data>\n"
        << "    </node>\n";
  }
  int edge_id = 0;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (f.net.weights(i, j) <= 0.0) continue;
      out << "    <edge id=\"e" << edge_id++ << "\" source=\"n" << i << "\" target=\"n" << j
          << "\">\n"
          << "      <data key=\"weight\">" << format_double(f.net.weights(i, j)) << "</data>\n"
          << "      <data key=\"sign\">" << f.net.signs(i, j) << "</data>\n"
          << "    </edge>\n";
    }
  }
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

std::string dot(const FitResult& f) {
  const std::vector<NodeContext> ctx = node_contexts(f);
  std::ostringstream out;
  out << "graph network {\n";
  const int p = f.net.p();
  double wmax = 0.0;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) wmax = std::max(wmax, f.net.weights(i, j));
  }
  for (int i = 0; i < p; ++i) {
    out << "  \"" << dot_escape(f.net.node_names[i]) << "\" [layer=\""
        << dot_escape(ctx[i].layer) << "\", community=" << ctx[i].community << "];\n";
  }
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const double w = f.net.weights(i, j);
      if (w <= 0.0) continue;
      const char* color = f.net.signs(i, j) > 0   ? "blue"
                          : f.net.signs(i, j) < 0 ? "red"
                                                  : "gray";
      const double penwidth = wmax > 0.0 ? 0.5 + 4.0 * w / wmax : 1.0;
      out << "  \"" << dot_escape(f.net.node_names[i]) << "\" -- \""
          << dot_escape(f.net.node_names[j]) << "\" [weight=" << format_double(w)
          << ", penwidth=" << format_double(penwidth) << ", color=" << color << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace mixnet

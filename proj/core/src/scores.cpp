#include "mixnet/scores.hpp"

#include <cstdlib>

#include "mixnet/errors.hpp"

namespace mixnet {
namespace {

bool missing_token(const std::string& s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan";
}

double parse_numeric(const std::string& token, const std::string& column, std::size_t row) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw DataError("scores: value '" + token + "' in column '" + column + "' (row " +
                    std::to_string(row + 1) + ") is not numeric");
  }
  return v;
}

}  // namespace

Eigen::MatrixXd network_loadings(const Eigen::MatrixXd& weights, const Partition& part,
                                 bool normalize) {
  const int p = static_cast<int>(weights.rows());
  if (static_cast<int>(part.assignment.size()) != p) {
    throw EstimationError("loadings: partition size must match the number of nodes");
  }
  if (part.n_communities < 1) {
    throw EstimationError("loadings require at least 1 community");
  }
  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(p, part.n_communities);
  for (int j = 0; j < p; ++j) {
    const int c = part.assignment[j];
    if (c <= 0) continue;
    double total = 0.0;
    for (int k = 0; k < p; ++k) {
      if (k != j && part.assignment[k] == c) total += weights(j, k);
    }
    o(j, c - 1) = total;
  }
  if (normalize) {
    for (int c = 0; c < o.cols(); ++c) {
      const double colsum = o.col(c).sum();
      if (colsum > 0.0) o.col(c) /= colsum;
    }
  }
  return o;
}

std::vector<NodeScoreSpec> score_spec(const NetworkFit& net,
                                      const std::vector<Variable>& training_variables,
                                      const ScalingReport& scaling) {
  std::vector<NodeScoreSpec> spec;
  spec.reserve(net.node_names.size());
  for (std::size_t j = 0; j < net.node_names.size(); ++j) {
    const int col = net.node_column[j];
    const Variable& var = training_variables[col];
    NodeScoreSpec s;
    s.name = var.name;
    s.kind = var.kind;
    s.levels = var.levels;
    s.mean = scaling.mean[col];
    s.sd = scaling.sd[col];
    spec.push_back(std::move(s));
  }
  return spec;
}

Eigen::MatrixXd standardized_node_values(const RawTable& data,
                                         const std::vector<NodeScoreSpec>& spec,
                                         const Eigen::MatrixXd& loadings, const Partition& part) {
  const int p = static_cast<int>(spec.size());
  if (loadings.rows() != p || static_cast<int>(part.assignment.size()) != p) {
    throw EstimationError("scores: loadings and partition must cover every node");
  }
  const int n = data.n_rows();
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, p);

  for (int j = 0; j < p; ++j) {
    const NodeScoreSpec& s = spec[j];
    if (part.assignment[j] > 0 && s.kind == VariableKind::categorical && s.levels.size() > 2) {
      throw DataError("scores: node '" + s.name +
                      "' is a categorical variable with 3+ levels inside a scored community; "
                      "no single numeric coding exists");
    }
    int col = -1;
    for (std::size_t c = 0; c < data.names.size(); ++c) {
      if (data.names[c] == s.name) {
        col = static_cast<int>(c);
        break;
      }
    }
    if (col < 0) {
      if (loadings.row(j).cwiseAbs().maxCoeff() == 0.0) continue;  // value never used
      throw DataError("scores: required column '" + s.name + "' is missing from the data");
    }
    if (s.sd <= 0.0) {
      throw DataError("scores: column '" + s.name + "' had zero variance in the training data");
    }
    for (int i = 0; i < n; ++i) {
      const std::string& token = data.columns[col][i];
      if (missing_token(token)) {
        throw DataError("scores: missing value in column '" + s.name + "' (row " +
                        std::to_string(i + 1) + ")");
      }
      double raw = 0.0;
      if (s.kind == VariableKind::categorical) {
        int level = -1;
        for (std::size_t l = 0; l < s.levels.size(); ++l) {
          if (s.levels[l] == token) {
            level = static_cast<int>(l);
            break;
          }
        }
        if (level < 0) {
          throw DataError("scores: value '" + token + "' in column '" + s.name +
                          "' is not a level seen in training");
        }
        raw = static_cast<double>(level);
      } else {
        raw = parse_numeric(token, s.name, static_cast<std::size_t>(i));
      }
      z(i, j) = (raw - s.mean) / s.sd;
    }
  }
  return z;
}

Eigen::MatrixXd community_scores(const Eigen::MatrixXd& z, const Eigen::MatrixXd& loadings) {
  if (z.cols() != loadings.rows()) {
    throw EstimationError("scores: node dimensions of values and loadings differ");
  }
  return z * loadings;
}

}  // namespace mixnet

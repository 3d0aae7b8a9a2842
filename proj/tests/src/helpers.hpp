#pragma once

// Seeded data generators shared by the unit and acceptance suites. All
// randomness flows through CounterRng so every test is reproducible.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mixnet/community.hpp"
#include "mixnet/data_model.hpp"
#include "mixnet/rng.hpp"

namespace testgen {

inline Eigen::MatrixXd gaussian_matrix(int n, int m, std::uint64_t seed) {
  mixnet::CounterRng rng(seed);
  Eigen::MatrixXd X(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) X(i, j) = rng.normal();
  return X;
}

// Columns with exact mean zero, unit 1/n-variance, and zero cross products
// (orthonormalized against the constant vector as well), so the lasso
// solution is exactly the soft-thresholded inner product / n even after the
// solver's internal centering and scaling.
inline Eigen::MatrixXd orthonormal_design(int n, int m, std::uint64_t seed) {
  Eigen::MatrixXd G(n, m + 1);
  G.col(0).setOnes();
  G.rightCols(m) = gaussian_matrix(n, m, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m + 1);
  return std::sqrt(static_cast<double>(n)) * Q.rightCols(m);
}

// Draws from N(0, Theta^{-1}) by Cholesky of the covariance.
inline Eigen::MatrixXd mvn_from_precision(const Eigen::MatrixXd& theta, int n,
                                          std::uint64_t seed) {
  Eigen::MatrixXd sigma = theta.inverse();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd Z = gaussian_matrix(n, static_cast<int>(theta.rows()), seed);
  return Z * L.transpose();
}

inline int poisson_draw(double lambda, mixnet::CounterRng& rng) {
  double limit = std::exp(-lambda);
  int k = 0;
  double p = 1.0;
  while (true) {
    p *= rng.uniform();
    if (p <= limit) return k;
    k += 1;
    if (k > 10000) return k;
  }
}

// A dataset of independent gaussian columns named x1..xp.
inline mixnet::Dataset dataset_from_matrix(const Eigen::MatrixXd& X,
                                           const std::string& prefix = "x") {
  mixnet::Dataset ds;
  ds.values = X;
  for (int j = 0; j < X.cols(); ++j) {
    mixnet::Variable v;
    v.name = prefix + std::to_string(j + 1);
    v.kind = mixnet::VariableKind::gaussian;
    ds.variables.push_back(std::move(v));
  }
  return ds;
}

inline mixnet::Dataset independent_gaussians(int n, int p, std::uint64_t seed) {
  return dataset_from_matrix(gaussian_matrix(n, p, seed));
}

// Mixed dataset: gaussians, one poisson, one binary categorical, all
// mutually dependent through a latent factor so edges exist to find.
inline mixnet::Dataset mixed_dataset(int n, int n_gauss, std::uint64_t seed) {
  mixnet::CounterRng rng(seed);
  const int p = n_gauss + 2;
  mixnet::Dataset ds;
  ds.values.resize(n, p);
  std::vector<double> latent(n);
  for (int i = 0; i < n; ++i) latent[i] = rng.normal();
  for (int j = 0; j < n_gauss; ++j) {
    mixnet::Variable v;
    v.name = "g" + std::to_string(j + 1);
    v.kind = mixnet::VariableKind::gaussian;
    for (int i = 0; i < n; ++i) ds.values(i, j) = 0.7 * latent[i] + rng.normal();
    ds.variables.push_back(std::move(v));
  }
  {
    mixnet::Variable v;
    v.name = "cnt";
    v.kind = mixnet::VariableKind::poisson;
    for (int i = 0; i < n; ++i) {
      double lam = std::exp(0.3 + 0.3 * latent[i]);
      ds.values(i, n_gauss) = poisson_draw(lam, rng);
    }
    ds.variables.push_back(std::move(v));
  }
  {
    mixnet::Variable v;
    v.name = "grp";
    v.kind = mixnet::VariableKind::categorical;
    v.levels = {"a", "b"};
    for (int i = 0; i < n; ++i) {
      double pr = 1.0 / (1.0 + std::exp(-latent[i]));
      ds.values(i, n_gauss + 1) = rng.uniform() < pr ? 1.0 : 0.0;
    }
    ds.variables.push_back(std::move(v));
  }
  return ds;
}

// Random symmetric weight/sign pair on p nodes: each pair gets an edge with
// probability `density`, weight in (0.2, 1.2), sign -1/+1/0 (0 rare).
struct RandomGraph {
  Eigen::MatrixXd W;
  Eigen::MatrixXi S;
};

inline RandomGraph random_graph(int p, double density, std::uint64_t seed,
                                bool with_undefined_signs = true) {
  mixnet::CounterRng rng(seed);
  RandomGraph g;
  g.W = Eigen::MatrixXd::Zero(p, p);
  g.S = Eigen::MatrixXi::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (rng.uniform() >= density) continue;
      double w = 0.2 + rng.uniform();
      int s = rng.uniform() < 0.4 ? -1 : 1;
      if (with_undefined_signs && rng.uniform() < 0.08) s = 0;
      g.W(i, j) = g.W(j, i) = w;
      g.S(i, j) = g.S(j, i) = s;
    }
  }
  return g;
}

// Random partition over p nodes: k communities, each node assigned uniformly,
// then a subset excluded. Communities are renumbered by first appearance.
inline mixnet::Partition random_partition(int p, int k, double exclude_prob,
                                          std::uint64_t seed) {
  mixnet::CounterRng rng(seed);
  mixnet::Partition part;
  part.assignment.resize(p);
  part.excluded_reason.assign(p, "");
  for (int i = 0; i < p; ++i) {
    if (rng.uniform() < exclude_prob) {
      part.assignment[i] = 0;
      part.excluded_reason[i] = "user";
    } else {
      part.assignment[i] = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(k)));
    }
  }
  mixnet::renumber_partition(part);
  return part;
}

// Block graph: two planted communities of sizes s1, s2 with dense internal
// edges (weight `win`) and a single cross edge of weight `cross`.
inline Eigen::MatrixXd two_blocks(int s1, int s2, double win, double cross) {
  int p = s1 + s2;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < s1; ++i)
    for (int j = i + 1; j < s1; ++j) W(i, j) = W(j, i) = win;
  for (int i = s1; i < p; ++i)
    for (int j = i + 1; j < p; ++j) W(i, j) = W(j, i) = win;
  W(0, s1) = W(s1, 0) = cross;
  return W;
}

}  // namespace testgen

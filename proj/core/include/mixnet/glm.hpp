#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace mixnet::glm {

enum class Family { gaussian, poisson, binomial, multinomial };

// One penalized regression problem. The design is raw-scale; the solver
// standardizes columns internally (mean 0, variance 1 with 1/n weights) and
// back-transforms coefficients before returning them. The objective is
//   (1/n) * NLL + lambda * (alpha * ||b||_1 + (1-alpha)/2 * ||b||_2^2)
// over penalized columns; intercepts are never penalized. Gaussian NLL is
// RSS/2 so the soft-threshold and lambda_max identities hold exactly.
struct Problem {
  Family family = Family::gaussian;
  Eigen::MatrixXd X;            // n x m
  Eigen::VectorXd y;            // gaussian/poisson responses
  std::vector<int> classes;     // binomial/multinomial responses, 0-based
  int n_classes = 0;            // response classes (binomial 2, multinomial K)
  std::vector<char> penalized;  // per column; empty means all penalized
  double alpha = 1.0;
  // Fold subproblems may contain dummy columns that became constant; those
  // coefficients are fixed at zero instead of raising an error.
  bool allow_constant_columns = false;

  int n() const { return static_cast<int>(X.rows()); }
  int m() const { return static_cast<int>(X.cols()); }
  bool is_penalized(int j) const { return penalized.empty() || penalized[j] != 0; }
};

// beta has one row per linear predictor (1 for gaussian/poisson/binomial,
// K for multinomial) and one column per design column.
struct Coefficients {
  Eigen::MatrixXd beta;
  Eigen::VectorXd intercept;

  int n_predictors() const { return static_cast<int>(beta.rows()); }
};

struct PathFit {
  std::vector<double> lambdas;
  std::vector<Coefficients> coefs;
  std::vector<double> deviance;  // -2 loglik on the training data
  std::vector<int> df;           // nonzero penalized coefficient entries
};

// Decreasing log-spaced grid from lambda_max, the smallest lambda whose fit
// has every penalized coefficient at zero. min_ratio <= 0 selects 0.01 when
// n > m and 0.05 otherwise.
std::vector<double> make_lambda_path(const Problem& problem, int n_lambda = 50,
                                     double min_ratio = -1.0);

// Fits the whole grid with warm starts. Throws EstimationError on a constant
// penalized column (unless allowed), a degenerate response, or when a single
// lambda exceeds the sweep budget.
PathFit fit_path(const Problem& problem, const std::vector<double>& lambdas);

Coefficients fit_single(const Problem& problem, double lambda);

// Largest violation of the first-order optimality conditions at the given
// solution, measured on the internally standardized scale. An exact optimum
// scores 0; solver output stays well below 1e-6.
double kkt_violation(const Problem& problem, const Coefficients& coef, double lambda);

struct CriterionRow {
  double alpha = 1.0;
  double lambda = 0.0;
  double value = 0.0;
  int df = 0;
};

struct SelectionResult {
  double lambda = 0.0;
  double alpha = 1.0;
  double criterion = 0.0;  // criterion value at the chosen pair
  Coefficients coef;
  std::string method;
  std::vector<CriterionRow> table;  // every (alpha, lambda) pair examined
};

// K-fold cross-validation, minimizing mean out-of-fold deviance per
// observation. Folds are seeded and stratified by response level for
// categorical responses. Ties prefer the larger lambda.
SelectionResult select_cv(const Problem& problem, const std::vector<double>& lambdas,
                          int folds, std::uint64_t seed);

// Extended BIC: -2 loglik + df log(n) + 2 gamma df log(m_penalized), where
// df counts nonzero penalized entries plus intercepts and unpenalized
// entries. Ties prefer the larger lambda.
SelectionResult select_ebic(const Problem& problem, const std::vector<double>& lambdas,
                            double gamma);

struct SelectSpec {
  std::string method = "cv";  // "cv" | "ebic"
  int folds = 10;
  double ebic_gamma = 0.25;
  std::uint64_t seed = 0;
  int n_lambda = 50;
  double min_ratio = -1.0;
};

// Joint (alpha, lambda) selection: each alpha gets its own path, the same
// criterion ranks all pairs. Ties prefer larger lambda, then larger alpha.
SelectionResult select_over_alphas(const Problem& problem, const std::vector<double>& alphas,
                                   const SelectSpec& spec);

// eta = intercept + X * beta^T, one column per linear predictor.
Eigen::MatrixXd linear_predictors(const Eigen::MatrixXd& X, const Coefficients& coef);

// Per-class probabilities from linear predictors (binomial: columns 1-p, p;
// multinomial: row-wise softmax).
Eigen::MatrixXd class_probabilities(const Eigen::MatrixXd& eta, Family family);

}  // namespace mixnet::glm

#include "mixnet/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mixnet/csv.hpp"
#include "mixnet/errors.hpp"
#include "mixnet/rng.hpp"

namespace mixnet::glm {

namespace {

constexpr double kTol = 1e-7;            // standardized coefficient move per sweep
constexpr long kSweepBudget = 100000;    // per lambda
constexpr double kEtaClamp = 30.0;
constexpr double kKktEps = 2.5e-7;       // polished optimality slack
constexpr double kProbFloor = 1e-12;
constexpr std::uint64_t kFoldSalt = 0x464f4c44ULL;

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

int n_linear_predictors(const Problem& p) {
  return p.family == Family::multinomial ? p.n_classes : 1;
}

void validate_problem(const Problem& p) {
  int n = p.n();
  if (n < 2) throw EstimationError("regression needs at least 2 observations");
  if (p.m() < 1) throw EstimationError("regression needs at least 1 design column");
  if (!p.penalized.empty() && static_cast<int>(p.penalized.size()) != p.m()) {
    throw EstimationError("penalized flag vector does not match design width");
  }
  if (p.alpha < 0.0 || p.alpha > 1.0) throw ConfigError("alpha must lie in [0, 1]");
  switch (p.family) {
    case Family::gaussian:
    case Family::poisson: {
      if (p.y.size() != n) throw EstimationError("response length does not match design");
      double mean = p.y.mean();
      if ((p.y.array() - mean).abs().maxCoeff() == 0.0) {
        throw EstimationError("response has zero variance");
      }
      if (p.family == Family::poisson && p.y.minCoeff() < 0.0) {
        throw EstimationError("poisson response has negative values");
      }
      break;
    }
    case Family::binomial:
    case Family::multinomial: {
      if (static_cast<int>(p.classes.size()) != n) {
        throw EstimationError("response length does not match design");
      }
      int K = p.n_classes;
      if (p.family == Family::binomial && K != 2) {
        throw EstimationError("binomial response must have exactly 2 classes");
      }
      if (K < 2) throw EstimationError("categorical response needs at least 2 classes");
      std::vector<int> counts(K, 0);
      for (int c : p.classes) {
        if (c < 0 || c >= K) throw EstimationError("response class out of range");
        ++counts[c];
      }
      for (int k = 0; k < K; ++k) {
        if (counts[k] == 0) throw EstimationError("response level " + std::to_string(k) + " is absent");
      }
      break;
    }
  }
}

struct Standardized {
  Eigen::MatrixXd X;      // constant columns zeroed
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // population sd (1/n); 0 marks a constant column
};

Standardized standardize_design(const Problem& p) {
  int n = p.n();
  int m = p.m();
  Standardized s;
  s.X = p.X;
  s.mean.resize(m);
  s.scale.resize(m);
  for (int j = 0; j < m; ++j) {
    double mu = s.X.col(j).mean();
    double var = (s.X.col(j).array() - mu).square().sum() / n;
    double sd = std::sqrt(var);
    s.mean[j] = mu;
    s.scale[j] = sd;
    if (sd == 0.0) {
      if (p.is_penalized(j) && !p.allow_constant_columns) {
        throw EstimationError("design column " + std::to_string(j) + " is constant");
      }
      s.X.col(j).setZero();
    } else {
      s.X.col(j) = (s.X.col(j).array() - mu) / sd;
    }
  }
  return s;
}

// One-hot response indicators per linear predictor.
Eigen::MatrixXd response_matrix(const Problem& p) {
  int n = p.n();
  if (p.family == Family::gaussian || p.family == Family::poisson) return p.y;
  if (p.family == Family::binomial) {
    Eigen::MatrixXd y(n, 1);
    for (int i = 0; i < n; ++i) y(i, 0) = p.classes[i] == 1 ? 1.0 : 0.0;
    return y;
  }
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, p.n_classes);
  for (int i = 0; i < n; ++i) y(i, p.classes[i]) = 1.0;
  return y;
}

struct SolveState {
  Eigen::MatrixXd beta;   // n_lin x m, standardized scale
  Eigen::VectorXd b0;     // n_lin
  Eigen::MatrixXd eta;    // n x n_lin
};

void refresh_eta(const Standardized& s, SolveState& st, int k) {
  st.eta.col(k) = (s.X * st.beta.row(k).transpose()).array() + st.b0[k];
}

// Exact intercept-only fit; gradients computed from it carry no iteration
// error, which keeps the all-zero fit at lambda_max exact.
void null_fit(const Problem& p, const Eigen::MatrixXd& y, SolveState& st) {
  switch (p.family) {
    case Family::gaussian:
      st.b0[0] = y.col(0).mean();
      break;
    case Family::poisson:
      st.b0[0] = std::log(std::max(y.col(0).mean(), 1e-12));
      break;
    case Family::binomial: {
      double pbar = std::min(std::max(y.col(0).mean(), 1e-12), 1.0 - 1e-12);
      st.b0[0] = std::log(pbar / (1.0 - pbar));
      break;
    }
    case Family::multinomial:
      for (int k = 0; k < st.b0.size(); ++k) {
        st.b0[k] = std::log(std::max(y.col(k).mean(), 1e-12));
      }
      break;
  }
}

Eigen::VectorXd clamp_exp(const Eigen::VectorXd& eta) {
  return eta.array().min(kEtaClamp).max(-kEtaClamp).exp();
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& eta) {
  Eigen::MatrixXd p = eta;
  for (int i = 0; i < p.rows(); ++i) {
    double mx = p.row(i).maxCoeff();
    p.row(i) = (p.row(i).array() - mx).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

// Mean response / per-class probability for each linear predictor.
Eigen::MatrixXd mean_response(Family family, const Eigen::MatrixXd& eta) {
  switch (family) {
    case Family::gaussian:
      return eta;
    case Family::poisson:
      return clamp_exp(eta.col(0));
    case Family::binomial:
      return (1.0 / (1.0 + (-eta.col(0).array()).min(kEtaClamp).max(-kEtaClamp).exp())).matrix();
    case Family::multinomial:
      return softmax_rows(eta);
  }
  return eta;
}

// Working weights and response for one linear predictor at the current eta.
void working_response(const Problem& p, const Eigen::MatrixXd& y, const SolveState& st, int k,
                      Eigen::VectorXd* w, Eigen::VectorXd* z) {
  int n = p.n();
  switch (p.family) {
    case Family::gaussian:
      *w = Eigen::VectorXd::Ones(n);
      *z = y.col(0);
      break;
    case Family::poisson: {
      Eigen::VectorXd mu = clamp_exp(st.eta.col(0));
      *w = mu.array().max(1e-6).matrix();
      *z = st.eta.col(0).array() + (y.col(0) - mu).array() / w->array();
      break;
    }
    case Family::binomial: {
      Eigen::MatrixXd mu = mean_response(Family::binomial, st.eta);
      *w = (mu.col(0).array() * (1.0 - mu.col(0).array())).max(1e-5).matrix();
      *z = st.eta.col(0).array() + (y.col(0) - mu.col(0)).array() / w->array();
      break;
    }
    case Family::multinomial: {
      Eigen::MatrixXd mu = softmax_rows(st.eta);
      *w = (mu.col(k).array() * (1.0 - mu.col(k).array())).max(1e-5).matrix();
      *z = st.eta.col(k).array() + (y.col(k) - mu.col(k)).array() / w->array();
      break;
    }
  }
}

// Penalized weighted least squares by cyclic coordinate descent with an
// active-set strategy. Returns the largest standardized coefficient move.
double weighted_cd(const Standardized& s, const Problem& p, const Eigen::VectorXd& w,
                   const Eigen::VectorXd& z, double lambda, SolveState& st, int k,
                   long* budget, double tol) {
  int n = p.n();
  int m = p.m();
  double alpha = p.alpha;
  double l1 = lambda * alpha;
  double l2 = lambda * (1.0 - alpha);

  Eigen::VectorXd r = z - st.eta.col(k);
  Eigen::VectorXd v(m);
  for (int j = 0; j < m; ++j) {
    v[j] = s.scale[j] == 0.0 ? 0.0 : (w.array() * s.X.col(j).array().square()).sum() / n;
  }
  double sw = w.sum();

  auto sweep = [&](bool full) {
    double maxd = 0.0;
    double d0 = (w.array() * r.array()).sum() / sw;
    if (d0 != 0.0) {
      st.b0[k] += d0;
      r.array() -= d0;
      maxd = std::abs(d0);
    }
    for (int j = 0; j < m; ++j) {
      if (s.scale[j] == 0.0) continue;
      double bj = st.beta(k, j);
      if (!full && bj == 0.0 && p.is_penalized(j)) continue;
      double g = (w.array() * s.X.col(j).array() * r.array()).sum() / n;
      double num = g + v[j] * bj;
      double bn;
      if (p.is_penalized(j)) {
        bn = soft_threshold(num, l1) / (v[j] + l2);
      } else {
        bn = num / v[j];
      }
      double d = bn - bj;
      if (d != 0.0) {
        st.beta(k, j) = bn;
        r -= d * s.X.col(j);
        maxd = std::max(maxd, std::abs(d));
      }
    }
    return maxd;
  };

  double max_total = 0.0;
  bool full = true;
  for (;;) {
    if (--(*budget) < 0) {
      throw EstimationError("coordinate descent exceeded its sweep budget at lambda=" +
                            format_double(lambda));
    }
    double maxd = sweep(full);
    max_total = std::max(max_total, maxd);
    if (maxd < tol) {
      if (full) break;
      full = true;
    } else {
      full = false;
    }
  }
  st.eta.col(k) = z - r;
  return max_total;
}

// Largest first-order optimality violation at the current (standardized)
// state, using exact gradients rather than the IRLS linearization.
double kkt_violation_std(const Standardized& s, const Problem& p, const Eigen::MatrixXd& y,
                         const SolveState& st, double lambda) {
  int n = p.n();
  int n_lin = n_linear_predictors(p);
  double l1 = lambda * p.alpha;
  double l2 = lambda * (1.0 - p.alpha);
  Eigen::MatrixXd mu = mean_response(p.family, st.eta);
  double worst = 0.0;
  for (int k = 0; k < n_lin; ++k) {
    Eigen::VectorXd res = y.col(k) - mu.col(k);
    worst = std::max(worst, std::abs(res.mean()));
    for (int j = 0; j < p.m(); ++j) {
      if (s.scale[j] == 0.0) continue;
      double g = s.X.col(j).dot(res) / n;
      double b = st.beta(k, j);
      if (!p.is_penalized(j)) {
        worst = std::max(worst, std::abs(g));
      } else if (b == 0.0) {
        worst = std::max(worst, std::abs(g) - l1);
      } else {
        worst = std::max(worst, std::abs(g - l2 * b - l1 * (b > 0 ? 1.0 : -1.0)));
      }
    }
  }
  return worst;
}

// IRLS outer loop for one lambda, polished until exact KKT conditions hold.
void solve_one(const Standardized& s, const Problem& p, const Eigen::MatrixXd& y,
               double lambda, SolveState& st) {
  long budget = kSweepBudget;
  int n_lin = n_linear_predictors(p);
  double tol = kTol;
  for (int round = 0;; ++round) {
    if (round > 500) {
      throw EstimationError("IRLS failed to reach optimality at lambda=" + format_double(lambda));
    }
    double max_delta = 0.0;
    for (int k = 0; k < n_lin; ++k) {
      Eigen::VectorXd w, z;
      working_response(p, y, st, k, &w, &z);
      max_delta = std::max(max_delta, weighted_cd(s, p, w, z, lambda, st, k, &budget, tol));
      refresh_eta(s, st, k);
    }
    if (max_delta < tol * 4.0) {
      if (kkt_violation_std(s, p, y, st, lambda) <= kKktEps) break;
      tol = std::max(tol * 0.5, 1e-13);
    }
  }
}

Coefficients back_transform(const Standardized& s, const SolveState& st) {
  int n_lin = static_cast<int>(st.beta.rows());
  int m = static_cast<int>(st.beta.cols());
  Coefficients c;
  c.beta.resize(n_lin, m);
  c.intercept.resize(n_lin);
  for (int k = 0; k < n_lin; ++k) {
    double shift = 0.0;
    for (int j = 0; j < m; ++j) {
      if (s.scale[j] == 0.0) {
        c.beta(k, j) = 0.0;
      } else {
        c.beta(k, j) = st.beta(k, j) / s.scale[j];
        shift += c.beta(k, j) * s.mean[j];
      }
    }
    c.intercept[k] = st.b0[k] - shift;
  }
  return c;
}

double minus_two_loglik(const Problem& p, const Eigen::MatrixXd& y, const SolveState& st) {
  int n = p.n();
  switch (p.family) {
    case Family::gaussian: {
      double rss = (y.col(0) - st.eta.col(0)).squaredNorm();
      return n * (std::log(2.0 * 3.141592653589793238462643383279502884 *
                           std::max(rss / n, 1e-300)) +
                  1.0);
    }
    case Family::poisson: {
      Eigen::VectorXd mu = clamp_exp(st.eta.col(0));
      double ll = 0.0;
      for (int i = 0; i < n; ++i) {
        ll += y(i, 0) * std::log(mu[i]) - mu[i] - std::lgamma(y(i, 0) + 1.0);
      }
      return -2.0 * ll;
    }
    case Family::binomial: {
      Eigen::MatrixXd mu = mean_response(Family::binomial, st.eta);
      double ll = 0.0;
      for (int i = 0; i < n; ++i) {
        double pi = y(i, 0) == 1.0 ? mu(i, 0) : 1.0 - mu(i, 0);
        ll += std::log(std::max(pi, kProbFloor));
      }
      return -2.0 * ll;
    }
    case Family::multinomial: {
      Eigen::MatrixXd mu = softmax_rows(st.eta);
      double ll = 0.0;
      for (int i = 0; i < n; ++i) {
        ll += std::log(std::max(mu(i, p.classes[i]), kProbFloor));
      }
      return -2.0 * ll;
    }
  }
  return 0.0;
}

int count_df(const Problem& p, const SolveState& st) {
  int df = 0;
  for (int j = 0; j < p.m(); ++j) {
    if (!p.is_penalized(j)) continue;
    for (int k = 0; k < st.beta.rows(); ++k) {
      if (st.beta(k, j) != 0.0) ++df;
    }
  }
  return df;
}

SolveState initial_state(const Problem& p, const Eigen::MatrixXd& y) {
  int n_lin = n_linear_predictors(p);
  SolveState st;
  st.beta = Eigen::MatrixXd::Zero(n_lin, p.m());
  st.b0 = Eigen::VectorXd::Zero(n_lin);
  st.eta = Eigen::MatrixXd::Zero(p.n(), n_lin);
  null_fit(p, y, st);
  for (int k = 0; k < n_lin; ++k) st.eta.col(k).setConstant(st.b0[k]);
  return st;
}

bool has_unpenalized(const Problem& p) {
  for (int j = 0; j < p.m(); ++j) {
    if (!p.is_penalized(j)) return true;
  }
  return false;
}

// Out-of-fold deviance contribution of one observation.
double oof_deviance(const Problem& p, const Eigen::MatrixXd& eta_row, double y_val, int y_class) {
  switch (p.family) {
    case Family::gaussian: {
      double d = y_val - eta_row(0, 0);
      return d * d;
    }
    case Family::poisson: {
      double mu = std::exp(std::min(std::max(eta_row(0, 0), -kEtaClamp), kEtaClamp));
      if (y_val > 0.0) return 2.0 * (mu - y_val + y_val * std::log(y_val / mu));
      return 2.0 * mu;
    }
    case Family::binomial: {
      double pr = 1.0 / (1.0 + std::exp(-std::min(std::max(eta_row(0, 0), -kEtaClamp), kEtaClamp)));
      double pi = y_class == 1 ? pr : 1.0 - pr;
      return -2.0 * std::log(std::max(pi, kProbFloor));
    }
    case Family::multinomial: {
      double mx = eta_row.maxCoeff();
      double denom = (eta_row.array() - mx).exp().sum();
      double pi = std::exp(eta_row(0, y_class) - mx) / denom;
      return -2.0 * std::log(std::max(pi, kProbFloor));
    }
  }
  return 0.0;
}

Problem subset_rows(const Problem& p, const std::vector<int>& rows) {
  Problem sub;
  sub.family = p.family;
  sub.n_classes = p.n_classes;
  sub.penalized = p.penalized;
  sub.alpha = p.alpha;
  sub.allow_constant_columns = true;
  sub.X.resize(rows.size(), p.m());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.X.row(i) = p.X.row(rows[i]);
  if (p.family == Family::gaussian || p.family == Family::poisson) {
    sub.y.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) sub.y[i] = p.y[rows[i]];
  } else {
    sub.classes.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) sub.classes[i] = p.classes[rows[i]];
  }
  return sub;
}

// Seeded fold assignment, stratified by level for categorical responses.
std::vector<int> make_folds(const Problem& p, int folds, std::uint64_t seed) {
  int n = p.n();
  std::vector<int> fold_of(n, 0);
  if (p.family == Family::gaussian || p.family == Family::poisson) {
    CounterRng rng(derive_key(seed, kFoldSalt));
    auto perm = rng.permutation(n);
    for (int i = 0; i < n; ++i) fold_of[perm[i]] = i % folds;
    return fold_of;
  }
  int offset = 0;
  for (int level = 0; level < p.n_classes; ++level) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (p.classes[i] == level) members.push_back(i);
    }
    CounterRng rng(derive_key(seed, kFoldSalt + 1 + static_cast<std::uint64_t>(level)));
    rng.shuffle(members);
    for (std::size_t k = 0; k < members.size(); ++k) {
      fold_of[members[k]] = (offset + static_cast<int>(k)) % folds;
    }
    offset = (offset + static_cast<int>(members.size())) % folds;
  }
  return fold_of;
}

void check_training_response(const Problem& sub) {
  if (sub.family == Family::gaussian || sub.family == Family::poisson) {
    double mean = sub.y.mean();
    if ((sub.y.array() - mean).abs().maxCoeff() == 0.0) {
      throw EstimationError("a CV training fold has a constant response; reduce the number of folds");
    }
    return;
  }
  std::vector<int> counts(sub.n_classes, 0);
  for (int c : sub.classes) ++counts[c];
  for (int k = 0; k < sub.n_classes; ++k) {
    if (counts[k] == 0) {
      throw EstimationError("a CV training fold lost a response level; reduce the number of folds");
    }
  }
}

}  // namespace

std::vector<double> make_lambda_path(const Problem& problem, int n_lambda, double min_ratio) {
  validate_problem(problem);
  if (n_lambda < 1) throw ConfigError("lambda path needs at least 1 point");
  if (min_ratio <= 0.0) min_ratio = problem.n() > problem.m() ? 0.01 : 0.05;
  if (min_ratio >= 1.0) throw ConfigError("lambda_min_ratio must lie in (0, 1)");

  Standardized s = standardize_design(problem);
  Eigen::MatrixXd y = response_matrix(problem);
  SolveState st = initial_state(problem, y);

  double safeguard = 1.0 + 1e-12;
  if (has_unpenalized(problem)) {
    // The null fit must optimize over unpenalized columns; run the solver at
    // an effectively infinite penalty and allow for its iteration slack.
    solve_one(s, problem, y, 1e30, st);
    safeguard = 1.0 + 1e-6;
  }

  Eigen::MatrixXd mu = mean_response(problem.family, st.eta);
  double gmax = 0.0;
  for (int k = 0; k < mu.cols(); ++k) {
    Eigen::VectorXd res = y.col(k) - mu.col(k);
    for (int j = 0; j < problem.m(); ++j) {
      if (!problem.is_penalized(j) || s.scale[j] == 0.0) continue;
      gmax = std::max(gmax, std::abs(s.X.col(j).dot(res) / problem.n()));
    }
  }
  if (gmax < 1e-300) throw EstimationError("null-model gradient vanished; response is degenerate");

  double lambda_max = gmax / std::max(problem.alpha, 1e-3) * safeguard;
  std::vector<double> lambdas(n_lambda);
  if (n_lambda == 1) {
    lambdas[0] = lambda_max;
    return lambdas;
  }
  double step = std::log(min_ratio) / (n_lambda - 1);
  for (int i = 0; i < n_lambda; ++i) lambdas[i] = lambda_max * std::exp(step * i);
  return lambdas;
}

PathFit fit_path(const Problem& problem, const std::vector<double>& lambdas) {
  validate_problem(problem);
  if (lambdas.empty()) throw ConfigError("lambda path is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] < 0.0) throw ConfigError("lambda must be non-negative");
    if (i > 0 && lambdas[i] > lambdas[i - 1]) {
      throw ConfigError("lambda path must be non-increasing");
    }
  }

  Standardized s = standardize_design(problem);
  Eigen::MatrixXd y = response_matrix(problem);
  SolveState st = initial_state(problem, y);

  PathFit out;
  out.lambdas = lambdas;
  out.coefs.reserve(lambdas.size());
  out.deviance.reserve(lambdas.size());
  out.df.reserve(lambdas.size());
  for (double lambda : lambdas) {
    solve_one(s, problem, y, lambda, st);
    out.coefs.push_back(back_transform(s, st));
    out.deviance.push_back(minus_two_loglik(problem, y, st));
    out.df.push_back(count_df(problem, st));
  }
  return out;
}

Coefficients fit_single(const Problem& problem, double lambda) {
  return fit_path(problem, {lambda}).coefs.front();
}

double kkt_violation(const Problem& problem, const Coefficients& coef, double lambda) {
  validate_problem(problem);
  Standardized s = standardize_design(problem);
  Eigen::MatrixXd y = response_matrix(problem);
  int n_lin = n_linear_predictors(problem);
  SolveState st;
  st.beta.resize(n_lin, problem.m());
  st.b0.resize(n_lin);
  for (int k = 0; k < n_lin; ++k) {
    double shift = 0.0;
    for (int j = 0; j < problem.m(); ++j) {
      st.beta(k, j) = coef.beta(k, j) * s.scale[j];
      shift += coef.beta(k, j) * s.mean[j];
    }
    st.b0[k] = coef.intercept[k] + shift;
  }
  st.eta.resize(problem.n(), n_lin);
  for (int k = 0; k < n_lin; ++k) refresh_eta(s, st, k);
  return kkt_violation_std(s, problem, y, st, lambda);
}

SelectionResult select_cv(const Problem& problem, const std::vector<double>& lambdas,
                          int folds, std::uint64_t seed) {
  validate_problem(problem);
  int n = problem.n();
  if (folds < 2 || folds > n) {
    throw ConfigError("cv folds must lie between 2 and n=" + std::to_string(n));
  }

  auto fold_of = make_folds(problem, folds, seed);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(lambdas.size());

  for (int f = 0; f < folds; ++f) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(i);
    if (test.empty()) continue;
    Problem sub = subset_rows(problem, train);
    check_training_response(sub);
    PathFit pf = fit_path(sub, lambdas);
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      const Coefficients& c = pf.coefs[li];
      for (int t : test) {
        Eigen::MatrixXd eta = problem.X.row(t) * c.beta.transpose() + c.intercept.transpose();
        double yv = problem.y.size() > 0 ? problem.y[t] : 0.0;
        int yc = problem.classes.empty() ? 0 : problem.classes[t];
        total[li] += oof_deviance(problem, eta, yv, yc);
      }
    }
  }

  PathFit full = fit_path(problem, lambdas);
  SelectionResult res;
  res.method = "cv";
  res.alpha = problem.alpha;
  int best = 0;
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    double value = total[li] / n;
    res.table.push_back({problem.alpha, lambdas[li], value, full.df[li]});
    if (value < res.table[best].value) best = static_cast<int>(li);
  }
  res.lambda = lambdas[best];
  res.criterion = res.table[best].value;
  res.coef = full.coefs[best];
  return res;
}

SelectionResult select_ebic(const Problem& problem, const std::vector<double>& lambdas,
                            double gamma) {
  validate_problem(problem);
  if (gamma < 0.0) throw ConfigError("ebic gamma must be non-negative");
  PathFit full = fit_path(problem, lambdas);

  int m_pen = 0;
  for (int j = 0; j < problem.m(); ++j) {
    if (problem.is_penalized(j)) ++m_pen;
  }
  int n_lin = problem.family == Family::multinomial ? problem.n_classes : 1;
  int fixed_df = n_lin + (problem.m() - m_pen) * n_lin;
  double log_n = std::log(static_cast<double>(problem.n()));
  double log_m = std::log(static_cast<double>(std::max(m_pen, 1)));

  SelectionResult res;
  res.method = "ebic";
  res.alpha = problem.alpha;
  int best = 0;
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    double df = full.df[li] + fixed_df;
    double value = full.deviance[li] + df * log_n + 2.0 * gamma * df * log_m;
    res.table.push_back({problem.alpha, lambdas[li], value, full.df[li]});
    if (value < res.table[best].value) best = static_cast<int>(li);
  }
  res.lambda = lambdas[best];
  res.criterion = res.table[best].value;
  res.coef = full.coefs[best];
  return res;
}

SelectionResult select_over_alphas(const Problem& problem, const std::vector<double>& alphas,
                                   const SelectSpec& spec) {
  if (alphas.empty()) throw ConfigError("alpha grid is empty");
  for (double a : alphas) {
    if (a < 0.0 || a > 1.0) throw ConfigError("alpha must lie in [0, 1]");
  }
  if (spec.method != "cv" && spec.method != "ebic") {
    throw ConfigError("unknown selection method '" + spec.method + "' (expected cv or ebic)");
  }

  SelectionResult best;
  bool have = false;
  std::vector<CriterionRow> table;
  for (double a : alphas) {
    Problem p = problem;
    p.alpha = a;
    auto lambdas = make_lambda_path(p, spec.n_lambda, spec.min_ratio);
    SelectionResult r = spec.method == "cv" ? select_cv(p, lambdas, spec.folds, spec.seed)
                                            : select_ebic(p, lambdas, spec.ebic_gamma);
    r.alpha = a;
    table.insert(table.end(), r.table.begin(), r.table.end());
    bool take = !have || r.criterion < best.criterion ||
                (r.criterion == best.criterion &&
                 (r.lambda > best.lambda || (r.lambda == best.lambda && a > best.alpha)));
    if (take) {
      best = std::move(r);
      have = true;
    }
  }
  best.table = std::move(table);
  return best;
}

Eigen::MatrixXd linear_predictors(const Eigen::MatrixXd& X, const Coefficients& coef) {
  Eigen::MatrixXd eta = X * coef.beta.transpose();
  eta.rowwise() += coef.intercept.transpose();
  return eta;
}

Eigen::MatrixXd class_probabilities(const Eigen::MatrixXd& eta, Family family) {
  switch (family) {
    case Family::gaussian:
      return eta;
    case Family::poisson:
      return eta.array().min(kEtaClamp).max(-kEtaClamp).exp();
    case Family::binomial: {
      Eigen::MatrixXd out(eta.rows(), 2);
      out.col(1) =
          (1.0 / (1.0 + (-eta.col(0).array()).min(kEtaClamp).max(-kEtaClamp).exp())).matrix();
      out.col(0) = 1.0 - out.col(1).array();
      return out;
    }
    case Family::multinomial:
      return softmax_rows(eta);
  }
  return eta;
}

}  // namespace mixnet::glm

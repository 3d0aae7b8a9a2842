#include "mixnet/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "mixnet/errors.hpp"
#include "mixnet/rng.hpp"

namespace mixnet {
namespace {

constexpr int kMaxRedraws = 10;
constexpr int kExhaustiveAlignLimit = 8;

// Minimum-cost assignment on a square matrix (potentials method); returns
// the column matched to each row. Used when the community count is too
// large for exhaustive matching.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> resample_indices(int n_rows, std::uint64_t seed_boot, int replicate,
                                  int attempt) {
  CounterRng rng(derive_key(derive_key(seed_boot, static_cast<std::uint64_t>(replicate)),
                            static_cast<std::uint64_t>(attempt)));
  std::vector<int> rows(static_cast<std::size_t>(n_rows));
  for (int i = 0; i < n_rows; ++i) {
    rows[i] = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n_rows)));
  }
  return rows;
}

Dataset subset_dataset(const Dataset& ds, const std::vector<int>& rows) {
  Dataset out;
  out.variables = ds.variables;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), ds.values.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.values.row(static_cast<Eigen::Index>(r)) = ds.values.row(rows[r]);
  }
  return out;
}

bool has_degenerate_categorical(const Dataset& ds) {
  for (int j = 0; j < ds.p(); ++j) {
    if (ds.variables[j].kind != VariableKind::categorical) continue;
    std::set<double> seen;
    for (int i = 0; i < ds.n(); ++i) {
      seen.insert(ds.values(i, j));
      if (seen.size() > 1) break;
    }
    if (seen.size() < 2) return true;
  }
  return false;
}

bool resample_replicate(const Dataset& ds, std::uint64_t seed_boot, int replicate, Dataset* out) {
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    Dataset draw = subset_dataset(ds, resample_indices(ds.n(), seed_boot, replicate, attempt));
    if (!has_degenerate_categorical(draw)) {
      *out = std::move(draw);
      return true;
    }
  }
  return false;
}

double empirical_quantile(const std::vector<double>& sorted_values, double p) {
  const int m = static_cast<int>(sorted_values.size());
  if (m == 0) throw BootstrapError("quantile of an empty sample");
  p = std::min(std::max(p, 0.0), 1.0);
  const double h = (m - 1) * p + 1.0;
  const int lo = static_cast<int>(std::floor(h));
  if (lo >= m) return sorted_values.back();
  const double frac = h - lo;
  return sorted_values[lo - 1] + frac * (sorted_values[lo] - sorted_values[lo - 1]);
}

std::pair<double, double> quantile_region(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const double tail = (1.0 - level) / 2.0;
  return {empirical_quantile(values, tail), empirical_quantile(values, 1.0 - tail)};
}

BootSummary summarize_replicates(const std::string& id, double estimated,
                                 const std::vector<double>& values, double level) {
  if (values.empty()) {
    throw BootstrapError("no successful replicate values for " + id);
  }
  BootSummary s;
  s.id = id;
  s.estimated = estimated;
  s.n_used = static_cast<int>(values.size());
  s.boot_mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n_used;
  if (s.n_used > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.boot_mean) * (v - s.boot_mean);
    s.boot_se = std::sqrt(ss / (s.n_used - 1));
  }
  std::tie(s.lower, s.upper) = quantile_region(values, level);
  return s;
}

std::vector<int> align_partition(const Partition& original, const Partition& replicate) {
  if (original.assignment.size() != replicate.assignment.size()) {
    throw BootstrapError("partition alignment: node sets differ");
  }
  const int n = static_cast<int>(original.assignment.size());
  const int ko = original.n_communities;
  const int kr = replicate.n_communities;
  std::vector<int> aligned(kr + 1, 0);
  if (ko == 0 || kr == 0) return aligned;

  // Shared-node contingency between original and replicate communities.
  std::vector<std::vector<double>> overlap(ko, std::vector<double>(kr, 0.0));
  for (int i = 0; i < n; ++i) {
    const int o = original.assignment[i];
    const int r = replicate.assignment[i];
    if (o > 0 && r > 0) overlap[o - 1][r - 1] += 1.0;
  }

  const int k = std::max(ko, kr);
  std::vector<int> row_to_col(k, -1);
  if (k <= kExhaustiveAlignLimit) {
    // Lexicographically first maximizer: deterministic tie-breaking that
    // favors low original-community ids keeping their best matches.
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_total = -1.0;
    do {
      double total = 0.0;
      for (int o = 0; o < ko; ++o) {
        if (perm[o] < kr) total += overlap[o][perm[o]];
      }
      if (total > best_total) {
        best_total = total;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    row_to_col = best;
  } else {
    std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
    for (int o = 0; o < ko; ++o) {
      for (int r = 0; r < kr; ++r) cost[o][r] = -overlap[o][r];
    }
    row_to_col = hungarian(cost);
  }

  for (int o = 0; o < ko; ++o) {
    const int r = row_to_col[o];
    if (r >= 0 && r < kr) aligned[r + 1] = o + 1;
  }
  return aligned;
}

StabilityReport membership_stability(const Partition& original,
                                     const std::vector<Partition>& replicates, double cutoff) {
  if (replicates.empty()) {
    throw BootstrapError("membership stability needs at least one successful replicate");
  }
  const int n = static_cast<int>(original.assignment.size());
  std::vector<int> same(n, 0);
  for (const Partition& rep : replicates) {
    const std::vector<int> aligned = align_partition(original, rep);
    for (int i = 0; i < n; ++i) {
      if (original.assignment[i] <= 0) continue;
      const int r = rep.assignment[i];
      if (r > 0 && aligned[r] == original.assignment[i]) ++same[i];
    }
  }
  StabilityReport report;
  report.cutoff = cutoff;
  report.n_replicates = static_cast<int>(replicates.size());
  for (int i = 0; i < n; ++i) {
    if (original.assignment[i] <= 0) continue;
    StabilityEntry e;
    e.node = i;
    e.proportion = static_cast<double>(same[i]) / report.n_replicates;
    e.stable = e.proportion >= cutoff;
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace mixnet

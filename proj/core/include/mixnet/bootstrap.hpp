#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mixnet/community.hpp"
#include "mixnet/data_model.hpp"

namespace mixnet {

// Row indices (with replacement) for one resampling attempt. Counter-based
// keying on (seed, replicate, attempt) makes every draw independent of
// execution order and thread count.
std::vector<int> resample_indices(int n_rows, std::uint64_t seed_boot, int replicate,
                                  int attempt);

// Rows of ds at the given indices; variable metadata is preserved.
Dataset subset_dataset(const Dataset& ds, const std::vector<int>& rows);

// True when some categorical column has a single observed level.
bool has_degenerate_categorical(const Dataset& ds);

// Resampled dataset for one replicate. Degenerate draws are redrawn with a
// bumped subkey up to 10 times; returns false when every attempt collapsed.
bool resample_replicate(const Dataset& ds, std::uint64_t seed_boot, int replicate, Dataset* out);

// Empirical quantile with interpolation position h = (m-1)*p + 1 over the
// sorted sample.
double empirical_quantile(const std::vector<double>& sorted_values, double p);

// (lower, upper) quantiles at (1-level)/2 and 1-(1-level)/2.
std::pair<double, double> quantile_region(std::vector<double> values, double level);

// Per-quantity bootstrap summary: point estimate from the original fit plus
// replicate mean, sample-SD standard error, and the quantile region.
struct BootSummary {
  std::string id;
  double estimated = 0.0;
  double boot_mean = 0.0;
  double boot_se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int n_used = 0;
};

BootSummary summarize_replicates(const std::string& id, double estimated,
                                 const std::vector<double>& values, double level);

// Maximum-agreement alignment of a replicate partition to the original:
// result[r] is the original community matched to replicate community r
// (index 0 unused; 0 means unmatched). Ties resolve to the assignment that
// is lexicographically smallest in original-community order.
std::vector<int> align_partition(const Partition& original, const Partition& replicate);

struct StabilityEntry {
  int node = 0;
  double proportion = 0.0;
  bool stable = false;
};

struct StabilityReport {
  std::vector<StabilityEntry> entries;  // nodes assigned in the original fit
  double cutoff = 0.7;
  int n_replicates = 0;
};

// Proportion of replicates that place each originally-assigned node in its
// original community after alignment; replicate-excluded nodes count as
// "not same". Throws when no replicate succeeded.
StabilityReport membership_stability(const Partition& original,
                                     const std::vector<Partition>& replicates, double cutoff);

}  // namespace mixnet

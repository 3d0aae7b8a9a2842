#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "mixnet/bootstrap.hpp"
#include "mixnet/errors.hpp"
#include "mixnet/rng.hpp"
#include "oracles.hpp"

using namespace mixnet;

TEST_CASE("resampling is a pure function of (seed, replicate, attempt)") {
  auto a = resample_indices(50, 7, 3, 0);
  auto b = resample_indices(50, 7, 3, 0);
  CHECK(a == b);
  CHECK(resample_indices(50, 7, 4, 0) != a);
  CHECK(resample_indices(50, 8, 3, 0) != a);
  CHECK(resample_indices(50, 7, 3, 1) != a);
  for (int i : a) {
    CHECK(i >= 0);
    CHECK(i < 50);
  }
  CHECK(a.size() == 50);
}

TEST_CASE("replicate row multisets are pairwise distinct across 150 draws") {
  std::set<std::vector<int>> seen;
  for (int r = 0; r < 150; ++r) {
    auto rows = resample_indices(100, 42, r, 0);
    std::sort(rows.begin(), rows.end());
    seen.insert(rows);
  }
  CHECK(seen.size() == 150);
}

TEST_CASE("degenerate categorical draws are redrawn then given up on") {
  // two-row dataset with one binary column: a draw picking the same row
  // twice collapses the column
  RawTable t;
  t.names = {"g", "b"};
  t.columns = {{"1.5", "2.5", "0.5", "4.5"}, {"0", "1", "0", "1"}};
  Dataset ds = infer_types(t, {});
  Dataset out;
  int successes = 0;
  for (int r = 0; r < 50; ++r) {
    if (resample_replicate(ds, 9, r, &out)) {
      successes += 1;
      CHECK_FALSE(has_degenerate_categorical(out));
      CHECK(out.n() == 4);
    }
  }
  // collapse probability per attempt is 2*(1/2)^4 = 1/8; eleven attempts make
  // a final failure vanishingly rare
  CHECK(successes == 50);
}

TEST_CASE("has_degenerate_categorical looks only at categorical columns") {
  // constant gaussian column: not a categorical degeneracy
  Dataset ds;
  ds.values.resize(3, 2);
  ds.values << 1.5, 0, 1.5, 1, 1.5, 0;
  Variable g;
  g.name = "g";
  g.kind = VariableKind::gaussian;
  Variable b;
  b.name = "b";
  b.kind = VariableKind::categorical;
  b.levels = {"0", "1"};
  ds.variables = {g, b};
  CHECK_FALSE(has_degenerate_categorical(ds));
  ds.values(1, 1) = 0;  // now b is all zeros
  CHECK(has_degenerate_categorical(ds));
}

TEST_CASE("subset_dataset picks rows and keeps metadata") {
  Dataset ds = testgen::mixed_dataset(10, 2, 5);
  Dataset sub = subset_dataset(ds, {3, 3, 9});
  CHECK(sub.n() == 3);
  CHECK(sub.values.row(0) == ds.values.row(3));
  CHECK(sub.values.row(1) == ds.values.row(3));
  CHECK(sub.values.row(2) == ds.values.row(9));
  CHECK(sub.variables.size() == ds.variables.size());
  CHECK(sub.variables.back().levels == ds.variables.back().levels);
}

TEST_CASE("quantile positions follow the (m-1)p+1 rule") {
  std::vector<double> flat = {5.0, 5.0, 5.0};
  auto r1 = quantile_region(flat, 0.95);
  CHECK(r1.first == 5.0);
  CHECK(r1.second == 5.0);

  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i + 1.0;
  auto r2 = quantile_region(v, 0.95);
  // hand evaluation: h_low = 99*0.025+1 = 3.475 -> 3 + 0.475, value 3.475;
  // h_high = 99*0.975+1 = 97.525 -> value 97.525
  CHECK(r2.first == doctest::Approx(3.475).epsilon(1e-12));
  CHECK(r2.second == doctest::Approx(97.525).epsilon(1e-12));

  auto r3 = quantile_region(v, 1.0);
  CHECK(r3.first == 1.0);
  CHECK(r3.second == 100.0);
}

TEST_CASE("empirical_quantile agrees with the direct-rule oracle") {
  mixnet::CounterRng rng(31);
  std::vector<double> v;
  for (int i = 0; i < 37; ++i) v.push_back(rng.normal());
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (double p : {0.0, 0.025, 0.31, 0.5, 0.777, 0.975, 1.0}) {
    CHECK(empirical_quantile(sorted, p) ==
          doctest::Approx(oracle::type7_quantile(v, p)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(empirical_quantile(std::vector<double>{}, 0.5), BootstrapError);
}

TEST_CASE("single-replicate summaries degenerate cleanly") {
  BootSummary s = summarize_replicates("x", 0.4, {0.37}, 0.95);
  CHECK(s.boot_mean == 0.37);
  CHECK(s.boot_se == 0.0);
  CHECK(s.lower == 0.37);
  CHECK(s.upper == 0.37);
  CHECK(s.n_used == 1);
  CHECK(s.estimated == 0.4);
}

TEST_CASE("constant replicate values give zero spread") {
  BootSummary s = summarize_replicates("x", 0.5, {0.5, 0.5, 0.5, 0.5}, 0.9);
  CHECK(s.boot_se == 0.0);
  CHECK(s.upper - s.lower == 0.0);
}

TEST_CASE("summaries refuse an empty replicate set") {
  CHECK_THROWS_AS(summarize_replicates("x", 0.0, {}, 0.95), BootstrapError);
}

TEST_CASE("alignment maps permuted labels back") {
  Partition orig;
  orig.assignment = {1, 1, 2, 2, 3, 3};
  orig.excluded_reason.assign(6, "");
  orig.n_communities = 3;
  // same grouping, shuffled ids: 1<->3
  Partition rep;
  rep.assignment = {3, 3, 2, 2, 1, 1};
  rep.excluded_reason.assign(6, "");
  rep.n_communities = 3;
  auto map = align_partition(orig, rep);
  REQUIRE(map.size() == 4);
  CHECK(map[3] == 1);
  CHECK(map[2] == 2);
  CHECK(map[1] == 3);
}

TEST_CASE("alignment matches the exhaustive assignment oracle") {
  for (int trial = 0; trial < 60; ++trial) {
    int p = 6 + trial % 3;
    Partition a = testgen::random_partition(p, 2 + trial % 3, 0.15, 900 + trial);
    Partition b = testgen::random_partition(p, 2 + (trial + 1) % 3, 0.15, 1900 + trial);
    auto map = align_partition(a, b);
    int agree = 0;
    for (int i = 0; i < p; ++i) {
      if (a.assignment[i] <= 0 || b.assignment[i] <= 0) continue;
      if (map[b.assignment[i]] == a.assignment[i]) agree += 1;
    }
    int best = oracle::best_alignment_overlap(a.assignment, b.assignment,
                                              a.n_communities, b.n_communities);
    CHECK(agree == best);
  }
}

TEST_CASE("alignment handles differing community counts") {
  Partition orig;
  orig.assignment = {1, 1, 2, 2};
  orig.excluded_reason.assign(4, "");
  orig.n_communities = 2;
  Partition rep;  // replicate split community 2 in half
  rep.assignment = {1, 1, 2, 3};
  rep.excluded_reason.assign(4, "");
  rep.n_communities = 3;
  auto map = align_partition(orig, rep);
  CHECK(map[1] == 1);
  // communities 2 and 3 tie at one shared node each; the tie resolves to the
  // lexicographically-first maximum, which matches replicate 2 -> original 2
  CHECK(map[2] == 2);
  CHECK(map[3] == 0);  // unmatched
}

TEST_CASE("stability is 1 when replicates equal the original") {
  Partition orig;
  orig.assignment = {1, 1, 2, 2, 0};
  orig.excluded_reason = {"", "", "", "", "user"};
  orig.n_communities = 2;
  std::vector<Partition> reps(10, orig);
  StabilityReport rep = membership_stability(orig, reps, 0.7);
  REQUIRE(rep.entries.size() == 4);  // excluded node has no entry
  for (const auto& e : rep.entries) {
    CHECK(e.proportion == 1.0);
    CHECK(e.stable);
  }
  CHECK(rep.n_replicates == 10);
}

TEST_CASE("stability is invariant to replicate label permutations") {
  Partition orig;
  orig.assignment = {1, 1, 1, 2, 2, 3};
  orig.excluded_reason.assign(6, "");
  orig.n_communities = 3;
  Partition shuffled;
  shuffled.assignment = {2, 2, 2, 3, 3, 1};  // identical grouping, new ids
  shuffled.excluded_reason.assign(6, "");
  shuffled.n_communities = 3;
  StabilityReport rep = membership_stability(orig, {shuffled, shuffled}, 0.7);
  for (const auto& e : rep.entries) CHECK(e.proportion == 1.0);
}

TEST_CASE("replicate-excluded nodes count against stability") {
  Partition orig;
  orig.assignment = {1, 1, 2, 2};
  orig.excluded_reason.assign(4, "");
  orig.n_communities = 2;
  Partition rep = orig;
  rep.assignment[0] = 0;
  rep.excluded_reason[0] = "singleton";
  StabilityReport out = membership_stability(orig, {orig, rep}, 0.7);
  CHECK(out.entries[0].proportion == 0.5);
  CHECK_FALSE(out.entries[0].stable);
  CHECK(out.entries[1].proportion == 1.0);
}

TEST_CASE("cutoff boundary counts as stable") {
  Partition orig;
  orig.assignment = {1, 1, 2, 2};
  orig.excluded_reason.assign(4, "");
  orig.n_communities = 2;
  Partition rep = orig;
  rep.assignment[0] = 2;  // moved node
  // node 0 same in 7 of 10 replicates
  std::vector<Partition> reps(7, orig);
  for (int i = 0; i < 3; ++i) reps.push_back(rep);
  StabilityReport out = membership_stability(orig, reps, 0.7);
  CHECK(out.entries[0].proportion == doctest::Approx(0.7));
  CHECK(out.entries[0].stable);  // >= cutoff
}

TEST_CASE("zero successful replicates is an error") {
  Partition orig;
  orig.assignment = {1, 2};
  orig.excluded_reason.assign(2, "");
  orig.n_communities = 2;
  CHECK_THROWS_AS(membership_stability(orig, {}, 0.7), BootstrapError);
}

TEST_CASE("mismatched partition sizes are rejected") {
  Partition a;
  a.assignment = {1, 2};
  a.excluded_reason.assign(2, "");
  a.n_communities = 2;
  Partition b;
  b.assignment = {1, 2, 2};
  b.excluded_reason.assign(3, "");
  b.n_communities = 2;
  CHECK_THROWS_AS(align_partition(a, b), BootstrapError);
}

TEST_CASE("region coverage for a gaussian mean is near nominal") {
  // smaller version of the acceptance criterion: 300 experiments here
  int covered = 0;
  const int trials = 300, m = 200, n = 40;
  for (int t = 0; t < trials; ++t) {
    mixnet::CounterRng data_rng(derive_key(4040, t));
    std::vector<double> sample(n);
    for (int i = 0; i < n; ++i) sample[i] = data_rng.normal();
    std::vector<double> means;
    for (int r = 0; r < m; ++r) {
      mixnet::CounterRng rrng(derive_key(derive_key(5050, t), r));
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += sample[rrng.bounded(n)];
      means.push_back(s / n);
    }
    auto region = quantile_region(means, 0.95);
    if (region.first <= 0.0 && 0.0 <= region.second) covered += 1;
  }
  // 95% nominal; loose window for the smaller trial count
  CHECK(covered >= 265);
  CHECK(covered <= 295);
}

#include <doctest.h>

#include <cstdlib>
#include <string>

#include "helpers.hpp"
#include "mixnet/archive.hpp"
#include "mixnet/errors.hpp"
#include "mixnet/pipeline.hpp"

using namespace mixnet;

namespace {

ModelConfig fast_config(int reps = 0) {
  ModelConfig cfg;
  cfg.selection = "ebic";
  cfg.seed_model = 3;
  cfg.seed_boot = 4;
  cfg.boot_reps = reps;
  cfg.workers = 1;
  return cfg;
}

}  // namespace

TEST_CASE("fit without bootstrap leaves the bootstrap sections empty") {
  Dataset ds = testgen::mixed_dataset(300, 3, 111);
  FitResult fit = fit_model(ds, {}, fast_config(0), nullptr);
  CHECK(fit.boot_requested == 0);
  CHECK(fit.boot_successful == 0);
  CHECK(fit.edge_summaries.empty());
  CHECK(fit.index_summaries.empty());
  CHECK(fit.stability.empty());
  CHECK(fit.multilayer == false);
  CHECK(fit.n_subjects == 300);
  REQUIRE(fit.layer_results.size() == 1);
  CHECK(fit.layer_results[0].nodes.size() == 5);
}

TEST_CASE("single-layer results match a one-layer specification bit-exactly") {
  Dataset ds = testgen::mixed_dataset(300, 3, 222);
  ModelConfig cfg = fast_config(5);
  FitResult plain = fit_model(ds, {}, cfg, nullptr);

  LayerInput layers;
  layers.labels = {"only"};
  for (const auto& v : ds.variables) layers.assignment[v.name] = "only";
  FitResult one = fit_model(ds, {}, cfg, &layers);

  CHECK((plain.net.weights - one.net.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(plain.layer_results[0].partition.assignment ==
        one.layer_results[0].partition.assignment);
  REQUIRE(plain.edge_summaries.size() == one.edge_summaries.size());
  for (std::size_t k = 0; k < plain.edge_summaries.size(); ++k) {
    CHECK(plain.edge_summaries[k].stats.boot_mean == one.edge_summaries[k].stats.boot_mean);
    CHECK(plain.edge_summaries[k].stats.lower == one.edge_summaries[k].stats.lower);
  }
  // the only difference is the layer label
  CHECK(one.layer_results[0].label == "only");
  CHECK(plain.layer_results[0].label == "1");
}

TEST_CASE("bootstrap summaries are identical for any worker count") {
  Dataset ds = testgen::mixed_dataset(250, 3, 333);
  ModelConfig cfg = fast_config(10);
  cfg.workers = 1;
  FitResult w1 = fit_model(ds, {}, cfg, nullptr);
  cfg.workers = 4;
  FitResult w4 = fit_model(ds, {}, cfg, nullptr);

  REQUIRE(w1.edge_summaries.size() == w4.edge_summaries.size());
  for (std::size_t k = 0; k < w1.edge_summaries.size(); ++k) {
    const auto& a = w1.edge_summaries[k].stats;
    const auto& b = w4.edge_summaries[k].stats;
    CHECK(a.boot_mean == b.boot_mean);
    CHECK(a.boot_se == b.boot_se);
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);
    CHECK(a.n_used == b.n_used);
  }
  REQUIRE(w1.index_summaries.size() == w4.index_summaries.size());
  for (std::size_t k = 0; k < w1.index_summaries.size(); ++k) {
    CHECK(w1.index_summaries[k].stats.boot_mean == w4.index_summaries[k].stats.boot_mean);
  }
  REQUIRE(w1.stability.size() == w4.stability.size());
  for (std::size_t l = 0; l < w1.stability.size(); ++l) {
    REQUIRE(w1.stability[l].report.entries.size() == w4.stability[l].report.entries.size());
    for (std::size_t e = 0; e < w1.stability[l].report.entries.size(); ++e) {
      CHECK(w1.stability[l].report.entries[e].proportion ==
            w4.stability[l].report.entries[e].proportion);
    }
  }
}

TEST_CASE("edge summaries cover every unordered pair including absent edges") {
  Dataset ds = testgen::mixed_dataset(250, 3, 444);
  FitResult fit = fit_model(ds, {}, fast_config(5), nullptr);
  const int p = fit.net.p();
  CHECK(static_cast<int>(fit.edge_summaries.size()) == p * (p - 1) / 2);
  // estimated values carry the sign
  for (const auto& es : fit.edge_summaries) {
    double w = fit.net.weights(es.i, es.j);
    double expect = fit.net.signs(es.i, es.j) < 0 ? -w : w;
    CHECK(es.stats.estimated == expect);
  }
}

TEST_CASE("replicate failures are recorded and tolerated below the cap") {
  // a gaussian column with one extreme row: resamples without that row are
  // fine; resamples made only of it would be constant, but that never
  // happens. Instead, force failures with a near-constant gaussian column
  // where most draws lose both distinct values.
  RawTable t;
  t.names = {"g", "h"};
  t.columns = {{"1.0", "1.0", "1.0", "5.0"}, {"0.5", "1.5", "2.5", "3.5"}};
  Dataset ds = infer_types(t, {});
  ModelConfig cfg = fast_config(12);
  cfg.seed_boot = 7;
  // with n = 4 and one off value, P(constant column g) per replicate is
  // (3/4)^4 + (1/4)^4 ~ 0.32; some replicates fail, usually not > 20%... so
  // this configuration exercises both paths depending on the seed. Assert
  // only the bookkeeping invariants here; the hard >20% case is below.
  try {
    FitResult fit = fit_model(ds, {}, cfg, nullptr);
    CHECK(fit.boot_requested == 12);
    CHECK(fit.boot_successful + static_cast<int>(fit.failures.size()) == 12);
    for (const auto& f : fit.failures) {
      CHECK(f.reason.find("variance") != std::string::npos);
    }
  } catch (const BootstrapError& e) {
    CHECK(std::string(e.what()).find("20%") != std::string::npos);
  }
}

TEST_CASE("too many failed replicates abort the bootstrap") {
  // two-row gaussian column: every resample that repeats a row collapses it;
  // P(constant) per replicate = 1/2, far beyond the 20% cap
  RawTable t;
  t.names = {"g", "h"};
  t.columns = {{"1.0", "2.0"}, {"0.5", "1.5"}};
  Dataset ds = infer_types(t, {});
  ModelConfig cfg = fast_config(20);
  CHECK_THROWS_AS(fit_model(ds, {}, cfg, nullptr), BootstrapError);
}

TEST_CASE("multilayer fits populate interlayer tables and per-layer results") {
  Dataset ds = testgen::mixed_dataset(400, 4, 555);  // g1..g4, cnt, grp
  LayerInput layers;
  layers.labels = {"gs", "rest"};
  layers.assignment = {{"g1", "gs"}, {"g2", "gs"}, {"g3", "gs"}, {"g4", "gs"},
                       {"cnt", "rest"}, {"grp", "rest"}};
  layers.rules = {{"gs", "rest", 1}};
  ModelConfig cfg = fast_config(4);
  FitResult fit = fit_model(ds, {}, cfg, &layers);
  CHECK(fit.multilayer);
  REQUIRE(fit.layer_results.size() == 2);
  CHECK(fit.layer_results[0].label == "gs");
  CHECK(fit.layer_results[1].label == "rest");
  CHECK(fit.layer_results[0].nodes == std::vector<int>{0, 1, 2, 3});
  CHECK_FALSE(fit.interlayer.rows.empty());
  // interlayer index summaries exist under the "interlayer" table name
  bool saw_interlayer = false;
  for (const auto& is : fit.index_summaries) saw_interlayer |= is.table == "interlayer";
  CHECK(saw_interlayer);
}

TEST_CASE("exclude_from_cluster removes named nodes from detection") {
  Dataset ds = testgen::mixed_dataset(300, 4, 666);
  ModelConfig cfg = fast_config(0);
  cfg.exclude_from_cluster = {"g1", "cnt"};
  FitResult fit = fit_model(ds, {}, cfg, nullptr);
  const auto& part = fit.layer_results[0].partition;
  const auto& nodes = fit.layer_results[0].nodes;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const std::string& name = fit.net.node_names[nodes[a]];
    if (name == "g1" || name == "cnt") {
      CHECK(part.assignment[a] == 0);
      CHECK(part.excluded_reason[a] == "user");
    }
  }
  ModelConfig bad = fast_config(0);
  bad.exclude_from_cluster = {"nope"};
  CHECK_THROWS_AS(fit_model(ds, {}, bad, nullptr), ConfigError);
}

TEST_CASE("covariates never appear as nodes") {
  Dataset ds = testgen::mixed_dataset(300, 3, 777);
  ModelConfig cfg = fast_config(0);
  cfg.covariates = {"g3"};
  FitResult fit = fit_model(ds, {}, cfg, nullptr);
  CHECK(fit.net.p() == 4);
  for (const auto& name : fit.net.node_names) CHECK(name != "g3");
  // the scaling report still covers every training column
  CHECK(fit.scaling.mean.size() == 5);
}

TEST_CASE("resolve_workers prefers config, then environment, then one") {
  ModelConfig cfg;
  cfg.workers = 3;
  CHECK(resolve_workers(cfg) == 3);
  cfg.workers = 0;
  setenv("MIXNET_WORKERS", "5", 1);
  CHECK(resolve_workers(cfg) == 5);
  unsetenv("MIXNET_WORKERS");
  CHECK(resolve_workers(cfg) == 1);
}

TEST_CASE("replicate loadings align to the original communities") {
  Dataset ds = testgen::mixed_dataset(300, 4, 888);
  FitResult fit = fit_model(ds, {}, fast_config(6), nullptr);
  REQUIRE(static_cast<int>(fit.replicate_loadings.size()) == fit.boot_successful);
  const auto& lr = fit.layer_results[0];
  for (const auto& rep : fit.replicate_loadings) {
    REQUIRE(rep.size() == 1);
    CHECK(rep[0].rows() == static_cast<int>(lr.nodes.size()));
    CHECK(rep[0].cols() == lr.partition.n_communities);
  }
}

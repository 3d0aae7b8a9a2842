// Microbenchmarks for the hot paths: the penalized solver, model selection,
// whole-network estimation, community detection, indices, and the bootstrap.

#include <benchmark/benchmark.h>

#include "helpers.hpp"
#include "mixnet/archive.hpp"
#include "mixnet/community.hpp"
#include "mixnet/glm.hpp"
#include "mixnet/indices.hpp"
#include "mixnet/mgm.hpp"
#include "mixnet/pipeline.hpp"
#include "mixnet/rng.hpp"

namespace {

using namespace mixnet;

glm::Problem gaussian_problem(int n, int m, std::uint64_t seed) {
  glm::Problem p;
  p.family = glm::Family::gaussian;
  p.X = testgen::gaussian_matrix(n, m, seed);
  CounterRng rng(derive_key(seed, 1));
  p.y.resize(n);
  for (int i = 0; i < n; ++i) {
    p.y(i) = 0.4 * p.X(i, 0) - 0.3 * p.X(i, 1) + rng.normal();
  }
  return p;
}

glm::Problem poisson_problem(int n, int m, std::uint64_t seed) {
  glm::Problem p;
  p.family = glm::Family::poisson;
  p.X = testgen::gaussian_matrix(n, m, seed);
  CounterRng rng(derive_key(seed, 1));
  p.y.resize(n);
  for (int i = 0; i < n; ++i) {
    p.y(i) = testgen::poisson_draw(std::exp(0.2 + 0.3 * p.X(i, 0)), rng);
  }
  return p;
}

void BM_GaussianPath(benchmark::State& state) {
  const glm::Problem p = gaussian_problem(500, static_cast<int>(state.range(0)), 11);
  const std::vector<double> lambdas = glm::make_lambda_path(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(glm::fit_path(p, lambdas));
  }
}
BENCHMARK(BM_GaussianPath)->Arg(20)->Arg(50);

void BM_PoissonPath(benchmark::State& state) {
  const glm::Problem p = poisson_problem(500, static_cast<int>(state.range(0)), 12);
  const std::vector<double> lambdas = glm::make_lambda_path(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(glm::fit_path(p, lambdas));
  }
}
BENCHMARK(BM_PoissonPath)->Arg(20)->Arg(50);

void BM_SelectCv(benchmark::State& state) {
  const glm::Problem p = gaussian_problem(400, 20, 13);
  const std::vector<double> lambdas = glm::make_lambda_path(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(glm::select_cv(p, lambdas, 10, 7));
  }
}
BENCHMARK(BM_SelectCv);

void BM_SelectEbic(benchmark::State& state) {
  const glm::Problem p = gaussian_problem(400, 20, 14);
  const std::vector<double> lambdas = glm::make_lambda_path(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(glm::select_ebic(p, lambdas, 0.25));
  }
}
BENCHMARK(BM_SelectEbic);

void BM_EstimateNetwork(benchmark::State& state) {
  const Dataset ds = testgen::mixed_dataset(static_cast<int>(state.range(0)), 6, 15);
  ModelConfig cfg;
  cfg.selection = "ebic";
  cfg.seed_model = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_network(ds, cfg));
  }
}
BENCHMARK(BM_EstimateNetwork)->Arg(250)->Arg(1000);

void BM_Louvain(benchmark::State& state) {
  const testgen::RandomGraph g =
      testgen::random_graph(static_cast<int>(state.range(0)), 0.1, 16, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(louvain(g.W, 5));
  }
}
BENCHMARK(BM_Louvain)->Arg(30)->Arg(100);

void BM_Walktrap(benchmark::State& state) {
  const testgen::RandomGraph g =
      testgen::random_graph(static_cast<int>(state.range(0)), 0.1, 17, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(walktrap(g.W, 4));
  }
}
BENCHMARK(BM_Walktrap)->Arg(30)->Arg(100);

void BM_GeneralIndices(benchmark::State& state) {
  const testgen::RandomGraph g =
      testgen::random_graph(static_cast<int>(state.range(0)), 0.2, 18);
  for (auto _ : state) {
    benchmark::DoNotOptimize(general_indices(g.W, g.S));
  }
}
BENCHMARK(BM_GeneralIndices)->Arg(20)->Arg(60);

void BM_PipelineBootstrap(benchmark::State& state) {
  const Dataset ds = testgen::mixed_dataset(200, 3, 19);
  ModelConfig cfg;
  cfg.selection = "ebic";
  cfg.seed_model = 3;
  cfg.seed_boot = 4;
  cfg.boot_reps = static_cast<int>(state.range(0));
  cfg.workers = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_model(ds, {}, cfg, nullptr));
  }
}
BENCHMARK(BM_PipelineBootstrap)->Arg(0)->Arg(10);

void BM_ArchiveRoundTrip(benchmark::State& state) {
  const Dataset ds = testgen::mixed_dataset(200, 3, 20);
  ModelConfig cfg;
  cfg.selection = "ebic";
  cfg.boot_reps = 10;
  cfg.workers = 1;
  Archive a;
  a.fit = fit_model(ds, {}, cfg, nullptr);
  a.config.model = cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(archive_from_json(archive_to_json(a)));
  }
}
BENCHMARK(BM_ArchiveRoundTrip);

}  // namespace

BENCHMARK_MAIN();

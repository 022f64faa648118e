// Copyright 2026 the qbmclass authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "qbm/chimera.hpp"
#include "qbm/dataset.hpp"
#include "qbm/features.hpp"
#include "qbm/rng.hpp"
#include "qbm/sa_sampler.hpp"
#include "qbm/sampler.hpp"

namespace {

qbm::RbmParameters random_params(int n, int m, std::uint64_t seed) {
  qbm::Rng rng(seed);
  qbm::RbmParameters p;
  p.visible_bias.resize(n);
  p.hidden_bias.resize(m);
  p.weights.resize(n, m);
  for (int i = 0; i < n; ++i) p.visible_bias[i] = rng.normal();
  for (int j = 0; j < m; ++j) p.hidden_bias[j] = rng.normal();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) p.weights(i, j) = rng.normal();
  return p;
}

void BM_GibbsSample(benchmark::State& state) {
  const auto p = random_params(static_cast<int>(state.range(0)),
                               static_cast<int>(state.range(1)), 1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qbm::gibbs_sample(p, 1000, 100, seed++));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_GibbsSample)->Args({12, 3})->Args({12, 1})->Args({64, 16});

void BM_ExactDistribution(benchmark::State& state) {
  const auto p = random_params(static_cast<int>(state.range(0)),
                               static_cast<int>(state.range(1)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qbm::exact_distribution(p));
  }
}
BENCHMARK(BM_ExactDistribution)->Args({8, 4})->Args({12, 6});

void BM_SaRestart(benchmark::State& state) {
  const auto p = random_params(12, 3, 3);
  const qbm::SaChimeraSampler sampler(4, 4);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.sample(p, 1, seed++));
  }
}
BENCHMARK(BM_SaRestart);

void BM_EmbedRbm(benchmark::State& state) {
  const auto graph = qbm::build_chimera(16, 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qbm::embed_rbm(64, 64, graph, 2.0));
  }
}
BENCHMARK(BM_EmbedRbm);

void BM_FisherScore(benchmark::State& state) {
  qbm::SyntheticSpec spec;
  spec.n_patients = 104;
  spec.n_genes = static_cast<int>(state.range(0));
  spec.n_informative = 10;
  spec.seed = 4;
  const auto dataset = qbm::generate_synthetic(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qbm::fisher_score(dataset));
  }
}
BENCHMARK(BM_FisherScore)->Arg(2000)->Arg(20000);

void BM_BinarizePatient(benchmark::State& state) {
  qbm::Rng rng(5);
  Eigen::VectorXd values(10);
  for (int f = 0; f < 10; ++f) values[f] = rng.uniform();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qbm::binarize_patient(values, {1, 0}, 1000, seed++));
  }
}
BENCHMARK(BM_BinarizePatient);

}  // namespace

BENCHMARK_MAIN();

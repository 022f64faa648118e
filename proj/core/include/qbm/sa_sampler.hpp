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

#ifndef QBM_SA_SAMPLER_HPP
#define QBM_SA_SAMPLER_HPP

#include "qbm/chimera.hpp"
#include "qbm/sampler.hpp"

namespace qbm {

/// Geometric temperature ladder for simulated annealing.
struct AnnealSchedule {
  double t_start = 10.0;
  double t_end = 0.1;
  int n_steps = 1000;

  void validate() const;
};

/// Classical stand-in for the quantum annealer: embeds the RBM on a chimera
/// graph, converts it to a QUBO, and draws each sample from an independent
/// simulated-annealing restart. Chains are read out by majority vote; ties
/// are broken by a seeded coin flip.
class SaChimeraSampler : public Sampler {
 public:
  explicit SaChimeraSampler(int rows = 16, int cols = 16, int cell_size = 4,
                            AnnealSchedule schedule = {});

  SampleSet sample(const RbmParameters& params, std::size_t n_samples,
                   std::uint64_t seed) const override;
  std::string name() const override { return "sa-chimera"; }

  const ChimeraGraph& graph() const { return graph_; }

 private:
  ChimeraGraph graph_;
  AnnealSchedule schedule_;
};

/// One-shot convenience wrapper on a 16x16 cell-size-4 graph.
SampleSet sa_chimera_sample(const RbmParameters& params, std::size_t n_samples,
                            const AnnealSchedule& schedule, std::uint64_t seed);

}  // namespace qbm

#endif

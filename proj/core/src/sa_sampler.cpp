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

#include "qbm/sa_sampler.hpp"

#include <cmath>
#include <unordered_map>

#include "qbm/errors.hpp"
#include "qbm/rng.hpp"

namespace qbm {

void AnnealSchedule::validate() const {
  if (t_start <= 0.0 || t_end <= 0.0 || t_end > t_start) {
    throw InvalidInputError("AnnealSchedule: need t_start >= t_end > 0");
  }
  if (n_steps < 1) throw InvalidInputError("AnnealSchedule: n_steps must be >= 1");
}

namespace {

/// Compact view of a QUBO over its active variables only, with adjacency
/// lists for O(degree) flip deltas.
struct CompactQubo {
  std::vector<double> linear;                          // per active variable
  std::vector<std::vector<std::pair<int, double>>> nbrs;
  std::vector<int> var_ids;                            // active -> qubit id

  explicit CompactQubo(const QuboProblem& qubo) {
    var_ids = qubo.variables();
    std::unordered_map<int, int> dense;
    dense.reserve(var_ids.size());
    for (std::size_t i = 0; i < var_ids.size(); ++i) {
      dense[var_ids[i]] = static_cast<int>(i);
    }
    linear.assign(var_ids.size(), 0.0);
    nbrs.assign(var_ids.size(), {});
    for (const auto& [q, coeff] : qubo.linear) linear[dense[q]] = coeff;
    for (const auto& [edge, coeff] : qubo.quadratic) {
      const int u = dense[edge.first];
      const int v = dense[edge.second];
      nbrs[u].emplace_back(v, coeff);
      nbrs[v].emplace_back(u, coeff);
    }
  }

  double flip_delta(const std::vector<std::uint8_t>& x, int p) const {
    double field = linear[p];
    for (const auto& [q, coeff] : nbrs[p]) {
      if (x[q]) field += coeff;
    }
    return x[p] ? -field : field;
  }
};

std::uint8_t chain_readout(const std::vector<int>& chain,
                           const std::unordered_map<int, int>& dense,
                           const std::vector<std::uint8_t>& x, Rng& rng) {
  int ones = 0;
  for (int q : chain) ones += x[static_cast<std::size_t>(dense.at(q))];
  const int zeros = static_cast<int>(chain.size()) - ones;
  if (ones > zeros) return 1;
  if (ones < zeros) return 0;
  return rng.coin() ? 1 : 0;
}

}  // namespace

SaChimeraSampler::SaChimeraSampler(int rows, int cols, int cell_size,
                                   AnnealSchedule schedule)
    : graph_(build_chimera(rows, cols, cell_size)), schedule_(schedule) {
  schedule_.validate();
}

SampleSet SaChimeraSampler::sample(const RbmParameters& params,
                                   std::size_t n_samples,
                                   std::uint64_t seed) const {
  params.validate();
  const int n = static_cast<int>(params.n_visible());
  const int m = static_cast<int>(params.n_hidden());
  const Embedding emb =
      embed_rbm(n, m, graph_, default_chain_strength(params));
  const QuboProblem qubo = rbm_to_qubo(params, emb);
  const CompactQubo compact(qubo);
  const int n_vars = static_cast<int>(compact.var_ids.size());

  std::unordered_map<int, int> dense;
  dense.reserve(compact.var_ids.size());
  for (std::size_t i = 0; i < compact.var_ids.size(); ++i) {
    dense[compact.var_ids[i]] = static_cast<int>(i);
  }

  // Dense indices per logical chain. Besides single-qubit flips, each sweep
  // proposes flipping whole chains: once chains have frozen, a logical
  // variable can only change through a broken-chain state whose penalty the
  // low-temperature Metropolis walk cannot cross, so chain moves are needed
  // to keep the logical landscape mixing.
  std::vector<std::vector<int>> chains;
  chains.reserve(emb.visible_chains.size() + emb.hidden_chains.size());
  for (const auto* group : {&emb.visible_chains, &emb.hidden_chains}) {
    for (const auto& chain : *group) {
      std::vector<int> ids;
      ids.reserve(chain.size());
      for (int q : chain) ids.push_back(dense.at(q));
      chains.push_back(std::move(ids));
    }
  }

  const double cooling =
      schedule_.n_steps > 1
          ? std::pow(schedule_.t_end / schedule_.t_start,
                     1.0 / static_cast<double>(schedule_.n_steps - 1))
          : 1.0;

  SampleSet out;
  out.visible.reserve(n_samples);
  out.hidden.reserve(n_samples);
  out.weights.reserve(n_samples);
  out.energies.reserve(n_samples);

  std::vector<std::uint8_t> x(static_cast<std::size_t>(n_vars));
  for (std::size_t restart = 0; restart < n_samples; ++restart) {
    Rng rng(derive_seed(seed, {0x5a, restart}));
    for (auto& bit : x) bit = rng.coin() ? 1 : 0;

    double temperature = schedule_.t_start;
    for (int step = 0; step < schedule_.n_steps; ++step) {
      for (int p = 0; p < n_vars; ++p) {
        const double delta = compact.flip_delta(x, p);
        if (delta <= 0.0 ||
            rng.uniform() < std::exp(-delta / temperature)) {
          x[p] ^= 1U;
        }
      }
      for (const auto& chain : chains) {
        double delta = 0.0;
        for (int p : chain) {
          delta += compact.flip_delta(x, p);
          x[static_cast<std::size_t>(p)] ^= 1U;
        }
        if (!(delta <= 0.0 ||
              rng.uniform() < std::exp(-delta / temperature))) {
          for (int p : chain) x[static_cast<std::size_t>(p)] ^= 1U;
        }
      }
      temperature *= cooling;
    }

    std::vector<std::uint8_t> v(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> h(static_cast<std::size_t>(m));
    for (int i = 0; i < n; ++i) {
      v[i] = chain_readout(emb.visible_chains[i], dense, x, rng);
    }
    for (int j = 0; j < m; ++j) {
      h[j] = chain_readout(emb.hidden_chains[j], dense, x, rng);
    }
    out.visible.push_back(std::move(v));
    out.hidden.push_back(std::move(h));
    out.weights.push_back(1.0);
    out.energies.push_back(energy(params, out.visible.back(), out.hidden.back()));
  }
  return out;
}

SampleSet sa_chimera_sample(const RbmParameters& params, std::size_t n_samples,
                            const AnnealSchedule& schedule, std::uint64_t seed) {
  SaChimeraSampler sampler(16, 16, 4, schedule);
  return sampler.sample(params, n_samples, seed);
}

}  // namespace qbm

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

#include "qbm/sampler.hpp"

#include <cmath>

#include "qbm/errors.hpp"
#include "qbm/rng.hpp"

namespace qbm {

namespace {

constexpr Eigen::Index kEnumerationBound = 20;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void decode(std::uint64_t code, std::vector<std::uint8_t>& bits) {
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (code >> i) & 1U;
}

}  // namespace

double SampleSet::total_weight() const {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

std::vector<double> exact_distribution(const RbmParameters& params) {
  params.validate();
  const Eigen::Index n = params.n_visible();
  const Eigen::Index m = params.n_hidden();
  if (n + m > kEnumerationBound) {
    throw CapacityError("exact_distribution: n_visible + n_hidden > 20");
  }
  const std::uint64_t n_states = std::uint64_t{1} << (n + m);
  std::vector<double> neg_energies(n_states);
  std::vector<std::uint8_t> v(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> h(static_cast<std::size_t>(m));
  double max_val = -1e300;
  for (std::uint64_t s = 0; s < n_states; ++s) {
    decode(s >> m, v);
    decode(s & ((std::uint64_t{1} << m) - 1), h);
    neg_energies[s] = -energy(params, v, h);
    max_val = std::max(max_val, neg_energies[s]);
  }
  double z = 0.0;
  for (double& e : neg_energies) {
    e = std::exp(e - max_val);
    z += e;
  }
  for (double& e : neg_energies) e /= z;
  return neg_energies;
}

double visible_marginal(const RbmParameters& params,
                        const std::vector<std::uint8_t>& v) {
  params.validate();
  const Eigen::Index n = params.n_visible();
  const Eigen::Index m = params.n_hidden();
  if (n + m > kEnumerationBound) {
    throw CapacityError("visible_marginal: n_visible + n_hidden > 20");
  }
  // log Z over the visible space via the closed-form hidden trace.
  std::vector<double> logs;
  logs.reserve(std::size_t{1} << n);
  std::vector<std::uint8_t> state(static_cast<std::size_t>(n));
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    decode(code, state);
    logs.push_back(free_energy_log(params, state));
  }
  double max_log = logs.front();
  for (double l : logs) max_log = std::max(max_log, l);
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - max_log);
  const double log_z = max_log + std::log(acc);
  return std::exp(free_energy_log(params, v) - log_z);
}

SampleSet gibbs_sample(const RbmParameters& params, std::size_t n_samples,
                       std::size_t n_burn_in, std::uint64_t seed) {
  params.validate();
  const Eigen::Index n = params.n_visible();
  const Eigen::Index m = params.n_hidden();
  Rng rng(derive_seed(seed, {0x61bb5}));

  std::vector<std::uint8_t> v(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> h(static_cast<std::size_t>(m));
  for (auto& bit : v) bit = rng.coin() ? 1 : 0;

  SampleSet out;
  out.visible.reserve(n_samples);
  out.hidden.reserve(n_samples);
  out.weights.reserve(n_samples);
  out.energies.reserve(n_samples);

  const auto sweep = [&] {
    for (Eigen::Index j = 0; j < m; ++j) {
      double field = params.hidden_bias[j];
      for (Eigen::Index i = 0; i < n; ++i) {
        if (v[i]) field += params.weights(i, j);
      }
      h[j] = rng.bernoulli(sigmoid(field)) ? 1 : 0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      double field = params.visible_bias[i];
      for (Eigen::Index j = 0; j < m; ++j) {
        if (h[j]) field += params.weights(i, j);
      }
      v[i] = rng.bernoulli(sigmoid(field)) ? 1 : 0;
    }
  };

  for (std::size_t s = 0; s < n_burn_in; ++s) sweep();
  for (std::size_t s = 0; s < n_samples; ++s) {
    sweep();
    out.visible.push_back(v);
    out.hidden.push_back(h);
    out.weights.push_back(1.0);
    out.energies.push_back(energy(params, v, h));
  }
  return out;
}

SampleSet ExactSampler::sample(const RbmParameters& params,
                               std::size_t /*n_samples*/,
                               std::uint64_t /*seed*/) const {
  const Eigen::Index n = params.n_visible();
  const Eigen::Index m = params.n_hidden();
  const std::vector<double> probs = exact_distribution(params);

  SampleSet out;
  out.visible.reserve(probs.size());
  out.hidden.reserve(probs.size());
  out.weights = probs;
  out.energies.reserve(probs.size());
  std::vector<std::uint8_t> v(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> h(static_cast<std::size_t>(m));
  for (std::uint64_t s = 0; s < probs.size(); ++s) {
    decode(s >> m, v);
    decode(s & ((std::uint64_t{1} << m) - 1), h);
    out.visible.push_back(v);
    out.hidden.push_back(h);
    out.energies.push_back(energy(params, v, h));
  }
  return out;
}

SampleSet GibbsSampler::sample(const RbmParameters& params,
                               std::size_t n_samples,
                               std::uint64_t seed) const {
  return gibbs_sample(params, n_samples, n_burn_in_, seed);
}

}  // namespace qbm

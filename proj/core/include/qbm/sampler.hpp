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

#ifndef QBM_SAMPLER_HPP
#define QBM_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qbm/rbm.hpp"

namespace qbm {

/// Weighted collection of joint binary configurations with their energies.
/// Stochastic samplers use unit weights (one per sweep/restart); the exact
/// sampler stores the full table with Boltzmann probabilities as weights.
struct SampleSet {
  std::vector<std::vector<std::uint8_t>> visible;
  std::vector<std::vector<std::uint8_t>> hidden;
  std::vector<double> weights;
  std::vector<double> energies;

  std::size_t size() const { return weights.size(); }
  double total_weight() const;
};

/// Negative-phase source for training. Implementations must be deterministic
/// for a fixed seed and must not mutate shared state in sample().
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual SampleSet sample(const RbmParameters& params, std::size_t n_samples,
                           std::uint64_t seed) const = 0;
  virtual std::string name() const = 0;
};

// State codes enumerate unit-by-unit little-endian: bit i of the visible code
// is v[i], bit j of the hidden code is h[j]; the joint index is
// (v_code << n_hidden) | h_code.

/// P(v,h) over all 2^(n+m) joint states. Throws CapacityError above
/// n_visible + n_hidden = 20.
std::vector<double> exact_distribution(const RbmParameters& params);

/// P(v) = sum_h exp(-E(v,h)) / Z, computed without enumerating hidden states.
double visible_marginal(const RbmParameters& params,
                        const std::vector<std::uint8_t>& v);

/// Block Gibbs: alternates h ~ Bern(sigmoid(b + W'v)), v ~ Bern(sigmoid(a +
/// Wh)) from a seeded random start; discards n_burn_in sweeps then records
/// one configuration per sweep.
SampleSet gibbs_sample(const RbmParameters& params, std::size_t n_samples,
                       std::size_t n_burn_in, std::uint64_t seed);

/// Full joint table, weights = probabilities. n_samples and seed are ignored.
class ExactSampler : public Sampler {
 public:
  SampleSet sample(const RbmParameters& params, std::size_t n_samples,
                   std::uint64_t seed) const override;
  std::string name() const override { return "exact"; }
};

class GibbsSampler : public Sampler {
 public:
  explicit GibbsSampler(std::size_t n_burn_in = 100) : n_burn_in_(n_burn_in) {}
  SampleSet sample(const RbmParameters& params, std::size_t n_samples,
                   std::uint64_t seed) const override;
  std::string name() const override { return "gibbs"; }

 private:
  std::size_t n_burn_in_;
};

}  // namespace qbm

#endif

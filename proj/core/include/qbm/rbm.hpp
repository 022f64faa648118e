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

#ifndef QBM_RBM_HPP
#define QBM_RBM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "qbm/features.hpp"

namespace qbm {

class Sampler;

/// The three trainable parameter blocks of a restricted Boltzmann machine:
/// visible bias a, hidden bias b, and the visible-by-hidden weight matrix W.
/// Energy of a joint binary state is E(v,h) = -a'v - b'h - v'Wh.
struct RbmParameters {
  Eigen::VectorXd visible_bias;  // a, length n_visible
  Eigen::VectorXd hidden_bias;   // b, length n_hidden
  Eigen::MatrixXd weights;       // W, n_visible x n_hidden

  Eigen::Index n_visible() const { return visible_bias.size(); }
  Eigen::Index n_hidden() const { return hidden_bias.size(); }

  /// Throws InvalidInputError on inconsistent dimensions or non-finite entries.
  void validate() const;
};

struct Hyperparameters {
  double learning_rate = 0.75;
  int n_hidden = 3;
  int n_samples = 1024;  // negative-phase sample count per update
  int n_epochs = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One-hot class clamp appended to the visible layer. Class c is encoded as
/// the unit vector e_c; inference uses the all-ones "neutral" clamp.
struct ClampSpec {
  int n_classes = 2;

  std::vector<std::uint8_t> one_hot(int class_index) const;
  Eigen::VectorXd neutral() const { return Eigen::VectorXd::Ones(n_classes); }
};

double energy(const RbmParameters& params, const std::vector<std::uint8_t>& v,
              const std::vector<std::uint8_t>& h);

/// Zero biases, weights ~ N(0, 0.01^2). Deterministic per seed.
RbmParameters init_params(int n_visible, int n_hidden, std::uint64_t seed);

/// One contrastive-divergence style update: positive statistics from the
/// batch (hidden units as conditional probabilities), negative statistics
/// from the sampler. Returns the updated parameters.
RbmParameters train_batch(const RbmParameters& params, const BinaryBatch& batch,
                          const Sampler& sampler, const Hyperparameters& hyper,
                          std::uint64_t negative_seed);

/// One mean-field up-down pass over probabilities.
Eigen::VectorXd reconstruct(const RbmParameters& params,
                            const Eigen::VectorXd& v);

/// Appends the neutral clamp to `features`, reconstructs, and reads the
/// trailing clamp probabilities. Ties collapse to the lower class index.
std::pair<int, Eigen::VectorXd> classify(const RbmParameters& params,
                                         const Eigen::VectorXd& features,
                                         const ClampSpec& clamp);

/// Squared euclidean distance between predicted clamp and the one-hot truth.
double clamp_error(const Eigen::VectorXd& predicted,
                   const Eigen::VectorXd& truth);

/// log sum_h exp(-E(v,h)) in closed form (hidden units trace out).
double free_energy_log(const RbmParameters& params,
                       const std::vector<std::uint8_t>& v);

/// Exact mean log-likelihood of a batch of visible vectors, by enumerating
/// the visible space. Requires n_visible <= 24.
double batch_log_likelihood(const RbmParameters& params,
                            const std::vector<std::vector<std::uint8_t>>& vs);

}  // namespace qbm

#endif

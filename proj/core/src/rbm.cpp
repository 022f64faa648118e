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

#include "qbm/rbm.hpp"

#include <cmath>

#include "qbm/errors.hpp"
#include "qbm/rng.hpp"
#include "qbm/sampler.hpp"

namespace qbm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// log(1 + exp(x)) without overflow.
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

Eigen::VectorXd to_vector(const std::vector<std::uint8_t>& bits) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(bits.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = bits[i];
  return v;
}

}  // namespace

void RbmParameters::validate() const {
  if (weights.rows() != visible_bias.size() ||
      weights.cols() != hidden_bias.size()) {
    throw InvalidInputError("RbmParameters: inconsistent dimensions");
  }
  if (!visible_bias.allFinite() || !hidden_bias.allFinite() ||
      !weights.allFinite()) {
    throw InvalidInputError("RbmParameters: non-finite entry");
  }
}

void Hyperparameters::validate() const {
  if (learning_rate <= 0.0) throw InvalidInputError("learning_rate must be > 0");
  if (n_hidden < 1) throw InvalidInputError("n_hidden must be >= 1");
  if (n_samples < 1) throw InvalidInputError("n_samples must be >= 1");
  if (n_epochs < 1) throw InvalidInputError("n_epochs must be >= 1");
}

std::vector<std::uint8_t> ClampSpec::one_hot(int class_index) const {
  if (class_index < 0 || class_index >= n_classes) {
    throw InvalidInputError("class index out of range");
  }
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_classes), 0);
  bits[static_cast<std::size_t>(class_index)] = 1;
  return bits;
}

double energy(const RbmParameters& params, const std::vector<std::uint8_t>& v,
              const std::vector<std::uint8_t>& h) {
  const Eigen::Index n = params.n_visible();
  const Eigen::Index m = params.n_hidden();
  if (static_cast<Eigen::Index>(v.size()) != n ||
      static_cast<Eigen::Index>(h.size()) != m) {
    throw InvalidInputError("energy: state dimensions do not match parameters");
  }
  double e = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!v[i]) continue;
    e -= params.visible_bias[i];
    for (Eigen::Index j = 0; j < m; ++j) {
      if (h[j]) e -= params.weights(i, j);
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (h[j]) e -= params.hidden_bias[j];
  }
  return e;
}

RbmParameters init_params(int n_visible, int n_hidden, std::uint64_t seed) {
  if (n_visible < 1 || n_hidden < 1) {
    throw InvalidInputError("init_params: dimensions must be >= 1");
  }
  Rng rng(derive_seed(seed, {0x1217}));
  RbmParameters params;
  params.visible_bias = Eigen::VectorXd::Zero(n_visible);
  params.hidden_bias = Eigen::VectorXd::Zero(n_hidden);
  params.weights.resize(n_visible, n_hidden);
  for (int i = 0; i < n_visible; ++i) {
    for (int j = 0; j < n_hidden; ++j) {
      params.weights(i, j) = 0.01 * rng.normal();
    }
  }
  return params;
}

RbmParameters train_batch(const RbmParameters& params, const BinaryBatch& batch,
                          const Sampler& sampler, const Hyperparameters& hyper,
                          std::uint64_t negative_seed) {
  params.validate();
  const Eigen::Index n = params.n_visible();
  const Eigen::Index m = params.n_hidden();
  if (batch.replicas.empty()) throw InvalidInputError("train_batch: empty batch");
  if (static_cast<Eigen::Index>(batch.replicas.front().size()) != n) {
    throw InvalidInputError("train_batch: replica length does not match n_visible");
  }
  if (batch.clamp_mode != ClampMode::kTrueLabel) {
    throw InvalidInputError("train_batch: batch must carry the true-label clamp");
  }

  // Positive phase: hidden units as conditional probabilities given the data.
  Eigen::VectorXd v_pos = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd h_pos = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd vh_pos = Eigen::MatrixXd::Zero(n, m);
  for (const auto& replica : batch.replicas) {
    const Eigen::VectorXd v = to_vector(replica);
    const Eigen::VectorXd h_prob =
        (params.hidden_bias + params.weights.transpose() * v)
            .unaryExpr([](double x) { return sigmoid(x); });
    v_pos += v;
    h_pos += h_prob;
    vh_pos += v * h_prob.transpose();
  }
  const double batch_size = static_cast<double>(batch.replicas.size());
  v_pos /= batch_size;
  h_pos /= batch_size;
  vh_pos /= batch_size;

  // Negative phase: weighted averages over the sampler's configurations.
  const SampleSet samples =
      sampler.sample(params, static_cast<std::size_t>(hyper.n_samples),
                     negative_seed);
  Eigen::VectorXd v_neg = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd h_neg = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd vh_neg = Eigen::MatrixXd::Zero(n, m);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const double w = samples.weights[s];
    const Eigen::VectorXd v = to_vector(samples.visible[s]);
    const Eigen::VectorXd h = to_vector(samples.hidden[s]);
    v_neg += w * v;
    h_neg += w * h;
    vh_neg += w * v * h.transpose();
  }
  const double total = samples.total_weight();
  v_neg /= total;
  h_neg /= total;
  vh_neg /= total;

  RbmParameters updated = params;
  updated.visible_bias += hyper.learning_rate * (v_pos - v_neg);
  updated.hidden_bias += hyper.learning_rate * (h_pos - h_neg);
  updated.weights += hyper.learning_rate * (vh_pos - vh_neg);
  return updated;
}

Eigen::VectorXd reconstruct(const RbmParameters& params,
                            const Eigen::VectorXd& v) {
  if (v.size() != params.n_visible()) {
    throw InvalidInputError("reconstruct: input length does not match n_visible");
  }
  const Eigen::VectorXd h_prob =
      (params.hidden_bias + params.weights.transpose() * v)
          .unaryExpr([](double x) { return sigmoid(x); });
  return (params.visible_bias + params.weights * h_prob)
      .unaryExpr([](double x) { return sigmoid(x); });
}

std::pair<int, Eigen::VectorXd> classify(const RbmParameters& params,
                                         const Eigen::VectorXd& features,
                                         const ClampSpec& clamp) {
  const Eigen::Index n = params.n_visible();
  if (features.size() + clamp.n_classes != n) {
    throw InvalidInputError("classify: feature length + n_classes != n_visible");
  }
  Eigen::VectorXd v(n);
  v.head(features.size()) = features;
  v.tail(clamp.n_classes) = clamp.neutral();
  const Eigen::VectorXd recon = reconstruct(params, v);
  const Eigen::VectorXd probs = recon.tail(clamp.n_classes);
  int best = 0;
  for (int c = 1; c < clamp.n_classes; ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return {best, probs};
}

double clamp_error(const Eigen::VectorXd& predicted,
                   const Eigen::VectorXd& truth) {
  if (predicted.size() != truth.size()) {
    throw InvalidInputError("clamp_error: length mismatch");
  }
  return (predicted - truth).squaredNorm();
}

double free_energy_log(const RbmParameters& params,
                       const std::vector<std::uint8_t>& v) {
  const Eigen::Index n = params.n_visible();
  const Eigen::Index m = params.n_hidden();
  if (static_cast<Eigen::Index>(v.size()) != n) {
    throw InvalidInputError("free_energy_log: dimension mismatch");
  }
  double log_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (v[i]) log_sum += params.visible_bias[i];
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    double field = params.hidden_bias[j];
    for (Eigen::Index i = 0; i < n; ++i) {
      if (v[i]) field += params.weights(i, j);
    }
    log_sum += softplus(field);
  }
  return log_sum;
}

double batch_log_likelihood(const RbmParameters& params,
                            const std::vector<std::vector<std::uint8_t>>& vs) {
  const Eigen::Index n = params.n_visible();
  if (n > 24) throw CapacityError("batch_log_likelihood: n_visible > 24");
  if (vs.empty()) throw InvalidInputError("batch_log_likelihood: empty batch");

  // log Z via log-sum-exp over the visible space.
  std::vector<double> logs;
  logs.reserve(std::size_t{1} << n);
  std::vector<std::uint8_t> v(static_cast<std::size_t>(n), 0);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    for (Eigen::Index i = 0; i < n; ++i) v[i] = (code >> i) & 1U;
    logs.push_back(free_energy_log(params, v));
  }
  double max_log = logs.front();
  for (double l : logs) max_log = std::max(max_log, l);
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - max_log);
  const double log_z = max_log + std::log(acc);

  double total = 0.0;
  for (const auto& sample : vs) total += free_energy_log(params, sample) - log_z;
  return total / static_cast<double>(vs.size());
}

}  // namespace qbm

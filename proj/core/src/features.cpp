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

#include "qbm/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qbm/errors.hpp"
#include "qbm/rng.hpp"

namespace qbm {

FeatureScores fisher_score(const ExpressionDataset& dataset) {
  dataset.validate();
  if (!dataset.values.allFinite()) {
    throw InvalidInputError("fisher_score: non-finite expression value");
  }
  std::vector<int> class_rows[2];
  for (int p = 0; p < dataset.n_patients(); ++p) {
    class_rows[dataset.labels[static_cast<std::size_t>(p)]].push_back(p);
  }
  if (class_rows[0].size() < 2 || class_rows[1].size() < 2) {
    throw InvalidInputError("fisher_score: need at least 2 patients per class");
  }

  const Eigen::Index n_genes = dataset.n_genes();
  FeatureScores result;
  result.scores.resize(static_cast<std::size_t>(n_genes));
  for (Eigen::Index g = 0; g < n_genes; ++g) {
    double mean[2], var[2];
    for (int c = 0; c < 2; ++c) {
      const auto& rows = class_rows[c];
      double sum = 0.0;
      for (int p : rows) sum += dataset.values(p, g);
      mean[c] = sum / static_cast<double>(rows.size());
      double sq = 0.0;
      for (int p : rows) {
        const double d = dataset.values(p, g) - mean[c];
        sq += d * d;
      }
      var[c] = sq / static_cast<double>(rows.size());  // population variance
    }
    const double num = (mean[0] - mean[1]) * (mean[0] - mean[1]);
    const double den = var[0] + var[1];
    double score;
    if (den > 0.0) {
      score = num / den;
    } else {
      // zero within-class variance: a perfect separator, or a constant gene
      score = num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    result.scores[static_cast<std::size_t>(g)] = score;
  }

  result.ranking.resize(static_cast<std::size_t>(n_genes));
  std::iota(result.ranking.begin(), result.ranking.end(), 0);
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [&](int lhs, int rhs) {
                     return result.scores[static_cast<std::size_t>(lhs)] >
                            result.scores[static_cast<std::size_t>(rhs)];
                   });
  return result;
}

std::vector<int> select_top_k(const FeatureScores& scores, int k) {
  if (k < 1 || k > static_cast<int>(scores.ranking.size())) {
    throw InvalidInputError("select_top_k: k must be in [1, n_genes]");
  }
  return {scores.ranking.begin(), scores.ranking.begin() + k};
}

NormalizationModel fit_normalizer(const Eigen::MatrixXd& train_values) {
  if (train_values.rows() < 1) {
    throw InvalidInputError("fit_normalizer: empty matrix");
  }
  NormalizationModel model;
  model.min = train_values.colwise().minCoeff();
  model.max = train_values.colwise().maxCoeff();
  return model;
}

Eigen::MatrixXd apply_normalizer(const NormalizationModel& model,
                                 const Eigen::MatrixXd& values) {
  if (values.cols() != model.n_features()) {
    throw InvalidInputError("apply_normalizer: column count mismatch");
  }
  Eigen::MatrixXd out(values.rows(), values.cols());
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    const double lo = model.min[c];
    const double hi = model.max[c];
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
      if (hi == lo) {
        out(r, c) = 0.5;
      } else {
        out(r, c) = std::clamp((values(r, c) - lo) / (hi - lo), 0.0, 1.0);
      }
    }
  }
  return out;
}

Eigen::VectorXd apply_normalizer(const NormalizationModel& model,
                                 const Eigen::VectorXd& row) {
  const Eigen::MatrixXd out =
      apply_normalizer(model, Eigen::MatrixXd(row.transpose()));
  return out.row(0);
}

BinaryBatch binarize_patient(const Eigen::VectorXd& normalized,
                             const std::vector<std::uint8_t>& clamp,
                             int n_replicas, std::uint64_t seed) {
  if (n_replicas < 1) {
    throw InvalidInputError("binarize_patient: n_replicas must be >= 1");
  }
  const Eigen::Index n_features = normalized.size();
  for (Eigen::Index f = 0; f < n_features; ++f) {
    if (!(normalized[f] >= 0.0 && normalized[f] <= 1.0)) {
      throw InvalidInputError("binarize_patient: value outside [0,1]");
    }
  }

  BinaryBatch batch;
  batch.n_features = static_cast<int>(n_features);
  batch.n_clamp = static_cast<int>(clamp.size());
  batch.replicas.assign(
      static_cast<std::size_t>(n_replicas),
      std::vector<std::uint8_t>(static_cast<std::size_t>(n_features) + clamp.size(), 0));

  std::vector<int> order(static_cast<std::size_t>(n_replicas));
  for (Eigen::Index f = 0; f < n_features; ++f) {
    const auto ones =
        static_cast<std::size_t>(std::llround(normalized[f] * n_replicas));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, {0xb1a, static_cast<std::uint64_t>(f)}));
    rng.shuffle(order);
    for (std::size_t s = 0; s < ones; ++s) {
      batch.replicas[static_cast<std::size_t>(order[s])]
                    [static_cast<std::size_t>(f)] = 1;
    }
  }
  for (auto& replica : batch.replicas) {
    std::copy(clamp.begin(), clamp.end(),
              replica.begin() + static_cast<std::ptrdiff_t>(n_features));
  }
  return batch;
}

}  // namespace qbm

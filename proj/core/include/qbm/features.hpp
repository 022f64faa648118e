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

#ifndef QBM_FEATURES_HPP
#define QBM_FEATURES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qbm/dataset.hpp"

namespace qbm {

/// Per-gene two-class Fisher scores plus the descending ranking.
/// A gene with separated means but zero within-class variance scores +inf,
/// which ranks above every finite score. Ties rank by ascending gene index.
struct FeatureScores {
  std::vector<double> scores;   // per gene, nonnegative (may be +inf)
  std::vector<int> ranking;     // gene indices, scores non-increasing
};

/// (mu0 - mu1)^2 / (var0 + var1) with population variances.
/// Requires at least 2 patients of each class and finite values.
FeatureScores fisher_score(const ExpressionDataset& dataset);

/// First k entries of the ranking, in order. k must be in [1, n_genes].
std::vector<int> select_top_k(const FeatureScores& scores, int k);

/// Per-feature min/max over the training rows. apply() maps through
/// (x - min) / (max - min), clipped to [0,1]; constant features map to 0.5.
struct NormalizationModel {
  Eigen::VectorXd min;
  Eigen::VectorXd max;

  Eigen::Index n_features() const { return min.size(); }
};

NormalizationModel fit_normalizer(const Eigen::MatrixXd& train_values);
Eigen::MatrixXd apply_normalizer(const NormalizationModel& model,
                                 const Eigen::MatrixXd& values);
Eigen::VectorXd apply_normalizer(const NormalizationModel& model,
                                 const Eigen::VectorXd& row);

enum class ClampMode { kTrueLabel, kNeutral };

/// The replica representation of one patient: n_replicas binary vectors of
/// length n_features + n_clamp, all sharing the same clamp bits. Fed to the
/// RBM as a single training batch.
struct BinaryBatch {
  std::vector<std::vector<std::uint8_t>> replicas;
  int patient_index = -1;
  ClampMode clamp_mode = ClampMode::kTrueLabel;
  int n_features = 0;
  int n_clamp = 0;
};

/// Expands a normalized feature vector into n_replicas binary vectors. A
/// feature with value p gets exactly round(p * n_replicas) ones, placed by a
/// seeded shuffle independently per feature. Clamp bits are copied verbatim
/// into every replica.
BinaryBatch binarize_patient(const Eigen::VectorXd& normalized,
                             const std::vector<std::uint8_t>& clamp,
                             int n_replicas, std::uint64_t seed);

}  // namespace qbm

#endif

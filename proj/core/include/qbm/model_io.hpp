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

#ifndef QBM_MODEL_IO_HPP
#define QBM_MODEL_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "qbm/features.hpp"
#include "qbm/rbm.hpp"

namespace qbm {

/// Everything needed to classify a raw patient vector: the trained RBM plus
/// the exact preprocessing it was trained with (selected gene columns and
/// the normalizer fitted on the training rows).
struct TrainedModel {
  RbmParameters params;
  NormalizationModel normalizer;
  std::vector<int> feature_indices;        // columns of the original matrix
  std::vector<std::string> feature_gene_ids;
  ClampSpec clamp;
  std::vector<std::string> class_names;
  int n_genes_total = 0;

  /// Selects + normalizes a full-length raw gene vector, then classifies.
  std::pair<int, Eigen::VectorXd> classify_raw(
      const Eigen::VectorXd& raw_genes) const;
};

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace qbm

#endif

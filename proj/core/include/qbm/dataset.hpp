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

#ifndef QBM_DATASET_HPP
#define QBM_DATASET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qbm {

/// Patient-by-gene expression matrix with two-class labels.
struct ExpressionDataset {
  Eigen::MatrixXd values;                 // patients x genes
  std::vector<std::string> gene_ids;      // size = cols
  std::vector<std::string> patient_ids;   // size = rows
  std::vector<int> labels;                // size = rows, each 0 or 1
  std::vector<std::string> class_names;   // index -> display name

  Eigen::Index n_patients() const { return values.rows(); }
  Eigen::Index n_genes() const { return values.cols(); }

  /// Throws InvalidInputError on shape mismatch or labels outside {0,1}.
  void validate() const;

  /// Keeps the given gene columns (in the given order).
  ExpressionDataset select_genes(const std::vector<int>& gene_indices) const;
};

/// Matrix file: first row is a corner cell followed by gene identifiers,
/// each following row is a patient identifier followed by numeric values.
/// Labels file: one `patient_id<sep>class_name` row per patient (optional
/// header). Comma and tab delimiters are auto-detected. Class names map to
/// indices alphabetically unless `class_order` is given.
ExpressionDataset load_expression_csv(
    const std::filesystem::path& matrix_path,
    const std::filesystem::path& labels_path,
    const std::optional<std::vector<std::string>>& class_order = std::nullopt);

/// Writes the matrix/labels pair read back by load_expression_csv. Values are
/// printed shortest-round-trip, so save/load is bit-exact.
void save_expression_csv(const ExpressionDataset& dataset,
                         const std::filesystem::path& matrix_path,
                         const std::filesystem::path& labels_path);

/// Two-class Gaussian generator standing in for real expression data.
/// Informative genes have class means separated by class_separation
/// within-class standard deviations; the rest are class-independent noise.
struct SyntheticSpec {
  int n_patients = 104;
  int n_genes = 20000;
  int n_informative = 10;
  double class_separation = 3.0;
  double class_balance = 0.5;  // fraction of class 0, in (0,1)
  std::uint64_t seed = 0;

  void validate() const;
};

ExpressionDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace qbm

#endif

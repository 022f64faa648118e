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

#ifndef QBM_PIPELINE_HPP
#define QBM_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qbm/dataset.hpp"
#include "qbm/features.hpp"
#include "qbm/rbm.hpp"
#include "qbm/sampler.hpp"

namespace qbm {

/// Disjoint covering split of patient indices.
struct Partition {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
};

/// Stratified split: class proportions in each part match the full dataset
/// within one patient. Deterministic per seed. sizes must sum to the patient
/// count; both classes must land in the training part.
Partition make_partition(const ExpressionDataset& dataset,
                         const std::array<int, 3>& sizes, std::uint64_t seed);

struct GridSpec {
  std::vector<double> learning_rates;
  std::vector<int> n_hidden;
  std::vector<int> n_samples;

  std::size_t size() const {
    return learning_rates.size() * n_hidden.size() * n_samples.size();
  }

  /// hidden 1..3, lr 0.25..1.25 step 0.25, samples 1..2048 in powers of 2
  /// (180 combinations).
  static GridSpec full_grid();
};

struct GridPoint {
  double learning_rate = 0.0;
  int n_hidden = 0;
  int n_samples = 0;

  bool operator==(const GridPoint&) const = default;
};

struct SweepRecord {
  GridPoint point;
  int repetition = 0;     // 0-based
  double val_error = 0.0; // mean clamp error over validation patients
  int raw_score = 0;      // correctly classified test patients
};

struct SweepReport {
  GridSpec grid;
  std::uint64_t master_seed = 0;
  int n_repetitions = 3;
  int test_size = 0;
  std::vector<SweepRecord> records;
};

struct PipelineConfig {
  std::array<int, 3> sizes{80, 10, 14};
  int n_replicas = 1000;
  int n_epochs = 20;
  int n_repetitions = 3;
  int n_jobs = 1;
  ClampSpec clamp{2};
  /// Returns true (and fills the record) if this run was already computed.
  std::function<bool(const GridPoint&, int rep, SweepRecord&)> try_resume;
  /// Called once per finished run, from a single thread at a time.
  std::function<void(const SweepRecord&)> on_record;
};

/// Trains one RBM on the given normalized training rows. Visible layer is
/// features + clamp; one update per patient batch per epoch, patients
/// shuffled per epoch.
RbmParameters train_rbm(const Eigen::MatrixXd& normalized_train,
                        const std::vector<int>& train_labels,
                        const ClampSpec& clamp, const Sampler& sampler,
                        const Hyperparameters& hyper, int n_replicas);

/// Mean clamp error of neutral-clamp classification over the given rows.
double validation_error(const RbmParameters& params,
                        const Eigen::MatrixXd& normalized_rows,
                        const std::vector<int>& labels, const ClampSpec& clamp);

/// Count of correctly classified rows.
int score_test(const RbmParameters& params,
               const Eigen::MatrixXd& normalized_rows,
               const std::vector<int>& labels, const ClampSpec& clamp);

/// Full sweep: partition, normalize on train, then train/validate/test every
/// grid point for n_repetitions repetitions. Seeds derive from master_seed,
/// the grid point, and the repetition, so records are independent of
/// execution order and job count. The dataset must already be reduced to the
/// selected features.
SweepReport run_grid(const ExpressionDataset& dataset, const GridSpec& grid,
                     const Sampler& sampler, const PipelineConfig& config,
                     std::uint64_t master_seed);

/// Grid point with the lowest mean validation error across repetitions; ties
/// break toward fewer samples, then fewer hidden units, then lower rate.
GridPoint best_hyperparameters(const SweepReport& report);

/// CSV with header `lr,n_hidden,n_samples,rep,val_error,raw_score`.
void write_report_csv(const SweepReport& report, std::ostream& out);
SweepReport read_report_csv(std::istream& in, int test_size);

/// JSON summary with per-learning-rate frequency tables of the raw score
/// (0..test_size), mirroring the results histogram layout.
std::string report_summary_json(const SweepReport& report);

}  // namespace qbm

#endif

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

#include "qbm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "qbm/errors.hpp"
#include "qbm/rng.hpp"

namespace qbm {

namespace {

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return {buf, ptr};
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& values,
                          const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = values.row(rows[r]);
  }
  return out;
}

std::vector<int> take_labels(const std::vector<int>& labels,
                             const std::vector<int>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(labels[static_cast<std::size_t>(r)]);
  return out;
}

Eigen::VectorXd one_hot_vector(const ClampSpec& clamp, int label) {
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(clamp.n_classes);
  truth[label] = 1.0;
  return truth;
}

}  // namespace

Partition make_partition(const ExpressionDataset& dataset,
                         const std::array<int, 3>& sizes, std::uint64_t seed) {
  dataset.validate();
  const int n = static_cast<int>(dataset.n_patients());
  if (sizes[0] < 0 || sizes[1] < 0 || sizes[2] < 0 ||
      sizes[0] + sizes[1] + sizes[2] != n) {
    throw InvalidInputError("make_partition: sizes must be nonnegative and sum to the patient count");
  }

  std::vector<int> class_rows[2];
  for (int p = 0; p < n; ++p) {
    class_rows[dataset.labels[static_cast<std::size_t>(p)]].push_back(p);
  }
  const int n0 = static_cast<int>(class_rows[0].size());

  // Largest-remainder allocation of class 0 over the three parts; class 1
  // takes the rest, so both stay within one patient of proportional.
  int base[3];
  double remainder[3];
  int allocated = 0;
  for (int s = 0; s < 3; ++s) {
    const double quota =
        static_cast<double>(sizes[s]) * static_cast<double>(n0) / n;
    base[s] = static_cast<int>(std::floor(quota));
    remainder[s] = quota - base[s];
    allocated += base[s];
  }
  for (int extra = n0 - allocated; extra > 0; --extra) {
    int pick = 0;
    for (int s = 1; s < 3; ++s) {
      if (remainder[s] > remainder[pick]) pick = s;
    }
    ++base[pick];
    remainder[pick] = -1.0;
  }

  int counts[3][2];
  for (int s = 0; s < 3; ++s) {
    counts[s][0] = base[s];
    counts[s][1] = sizes[s] - base[s];
    if (counts[s][1] < 0) {
      throw InvalidInputError("make_partition: class imbalance exceeds the requested sizes");
    }
  }
  if (counts[0][0] == 0 || counts[0][1] == 0) {
    throw InvalidInputError("make_partition: a class would be absent from the training split");
  }

  Rng rng(derive_seed(seed, {0x9a7}));
  for (auto& rows : class_rows) rng.shuffle(rows);

  Partition part;
  std::vector<int>* splits[3] = {&part.train, &part.validation, &part.test};
  std::size_t cursor[2] = {0, 0};
  for (int s = 0; s < 3; ++s) {
    for (int c = 0; c < 2; ++c) {
      for (int taken = 0; taken < counts[s][c]; ++taken) {
        splits[s]->push_back(class_rows[c][cursor[c]++]);
      }
    }
    std::sort(splits[s]->begin(), splits[s]->end());
  }
  return part;
}

GridSpec GridSpec::full_grid() {
  GridSpec grid;
  grid.learning_rates = {0.25, 0.5, 0.75, 1.0, 1.25};
  grid.n_hidden = {1, 2, 3};
  for (int s = 1; s <= 2048; s *= 2) grid.n_samples.push_back(s);
  return grid;
}

RbmParameters train_rbm(const Eigen::MatrixXd& normalized_train,
                        const std::vector<int>& train_labels,
                        const ClampSpec& clamp, const Sampler& sampler,
                        const Hyperparameters& hyper, int n_replicas) {
  hyper.validate();
  const int n_patients = static_cast<int>(normalized_train.rows());
  if (n_patients == 0) throw InvalidInputError("train_rbm: empty training set");
  if (static_cast<std::size_t>(n_patients) != train_labels.size()) {
    throw InvalidInputError("train_rbm: label count mismatch");
  }
  const int n_features = static_cast<int>(normalized_train.cols());
  const int n_visible = n_features + clamp.n_classes;

  std::vector<BinaryBatch> batches;
  batches.reserve(static_cast<std::size_t>(n_patients));
  for (int p = 0; p < n_patients; ++p) {
    BinaryBatch batch = binarize_patient(
        normalized_train.row(p), clamp.one_hot(train_labels[p]), n_replicas,
        derive_seed(hyper.seed, {0xb17, static_cast<std::uint64_t>(p)}));
    batch.patient_index = p;
    batches.push_back(std::move(batch));
  }

  RbmParameters params = init_params(n_visible, hyper.n_hidden,
                                     derive_seed(hyper.seed, {0x171}));
  std::vector<int> order(static_cast<std::size_t>(n_patients));
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < hyper.n_epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(hyper.seed, {0xe, static_cast<std::uint64_t>(epoch)}));
    shuffle_rng.shuffle(order);
    for (std::size_t step = 0; step < order.size(); ++step) {
      params = train_batch(
          params, batches[static_cast<std::size_t>(order[step])], sampler,
          hyper,
          derive_seed(hyper.seed, {0x9e9, static_cast<std::uint64_t>(epoch),
                                   step}));
    }
  }
  return params;
}

double validation_error(const RbmParameters& params,
                        const Eigen::MatrixXd& normalized_rows,
                        const std::vector<int>& labels, const ClampSpec& clamp) {
  if (normalized_rows.rows() == 0) {
    throw InvalidInputError("validation_error: no rows");
  }
  double total = 0.0;
  for (Eigen::Index r = 0; r < normalized_rows.rows(); ++r) {
    const auto [cls, probs] = classify(params, normalized_rows.row(r), clamp);
    total += clamp_error(probs, one_hot_vector(clamp, labels[static_cast<std::size_t>(r)]));
  }
  return total / static_cast<double>(normalized_rows.rows());
}

int score_test(const RbmParameters& params,
               const Eigen::MatrixXd& normalized_rows,
               const std::vector<int>& labels, const ClampSpec& clamp) {
  int score = 0;
  for (Eigen::Index r = 0; r < normalized_rows.rows(); ++r) {
    const auto [cls, probs] = classify(params, normalized_rows.row(r), clamp);
    if (cls == labels[static_cast<std::size_t>(r)]) ++score;
  }
  return score;
}

SweepReport run_grid(const ExpressionDataset& dataset, const GridSpec& grid,
                     const Sampler& sampler, const PipelineConfig& config,
                     std::uint64_t master_seed) {
  dataset.validate();
  if (grid.size() == 0) throw InvalidInputError("run_grid: empty grid");

  const Partition part =
      make_partition(dataset, config.sizes, derive_seed(master_seed, {0x9a87}));
  const NormalizationModel norm =
      fit_normalizer(take_rows(dataset.values, part.train));
  const Eigen::MatrixXd train_rows =
      apply_normalizer(norm, take_rows(dataset.values, part.train));
  const Eigen::MatrixXd val_rows =
      apply_normalizer(norm, take_rows(dataset.values, part.validation));
  const Eigen::MatrixXd test_rows =
      apply_normalizer(norm, take_rows(dataset.values, part.test));
  const std::vector<int> train_labels = take_labels(dataset.labels, part.train);
  const std::vector<int> val_labels = take_labels(dataset.labels, part.validation);
  const std::vector<int> test_labels = take_labels(dataset.labels, part.test);

  struct Task {
    std::size_t lr_index, hidden_index, samples_index;
    int rep;
  };
  std::vector<Task> tasks;
  for (std::size_t li = 0; li < grid.learning_rates.size(); ++li) {
    for (std::size_t hi = 0; hi < grid.n_hidden.size(); ++hi) {
      for (std::size_t si = 0; si < grid.n_samples.size(); ++si) {
        for (int rep = 0; rep < config.n_repetitions; ++rep) {
          tasks.push_back({li, hi, si, rep});
        }
      }
    }
  }

  std::vector<SweepRecord> records(tasks.size());
  std::mutex callback_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;

  const auto worker = [&] {
    while (!failed.load()) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const Task& task = tasks[t];
      const GridPoint point{grid.learning_rates[task.lr_index],
                            grid.n_hidden[task.hidden_index],
                            grid.n_samples[task.samples_index]};
      SweepRecord record;
      record.point = point;
      record.repetition = task.rep;
      bool resumed = false;
      if (config.try_resume) {
        std::scoped_lock lock(callback_mutex);
        resumed = config.try_resume(point, task.rep, record);
      }
      if (!resumed) {
        try {
          Hyperparameters hyper;
          hyper.learning_rate = point.learning_rate;
          hyper.n_hidden = point.n_hidden;
          hyper.n_samples = point.n_samples;
          hyper.n_epochs = config.n_epochs;
          hyper.seed = derive_seed(
              master_seed,
              {task.lr_index, task.hidden_index, task.samples_index,
               static_cast<std::uint64_t>(task.rep)});
          const RbmParameters params =
              train_rbm(train_rows, train_labels, config.clamp, sampler, hyper,
                        config.n_replicas);
          record.val_error = val_rows.rows() > 0
                                 ? validation_error(params, val_rows,
                                                    val_labels, config.clamp)
                                 : 0.0;
          record.raw_score =
              score_test(params, test_rows, test_labels, config.clamp);
        } catch (const std::exception& e) {
          std::scoped_lock lock(callback_mutex);
          failed = true;
          failure = "grid point (lr=" + format_double(point.learning_rate) +
                    ", hidden=" + std::to_string(point.n_hidden) +
                    ", samples=" + std::to_string(point.n_samples) +
                    ", rep=" + std::to_string(task.rep) + "): " + e.what();
          return;
        }
      }
      records[t] = record;
      if (config.on_record && !resumed) {
        std::scoped_lock lock(callback_mutex);
        config.on_record(record);
      }
    }
  };

  const int n_jobs = std::max(1, config.n_jobs);
  if (n_jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < n_jobs; ++j) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  if (failed) throw InvalidInputError("run_grid failed at " + failure);

  SweepReport report;
  report.grid = grid;
  report.master_seed = master_seed;
  report.n_repetitions = config.n_repetitions;
  report.test_size = static_cast<int>(part.test.size());
  report.records = std::move(records);  // task order is already deterministic
  return report;
}

GridPoint best_hyperparameters(const SweepReport& report) {
  if (report.records.empty()) {
    throw InvalidInputError("best_hyperparameters: empty report");
  }
  struct Agg {
    GridPoint point;
    double total = 0.0;
    int count = 0;
  };
  std::vector<Agg> aggs;
  for (const auto& record : report.records) {
    auto it = std::find_if(aggs.begin(), aggs.end(), [&](const Agg& agg) {
      return agg.point == record.point;
    });
    if (it == aggs.end()) {
      aggs.push_back({record.point, record.val_error, 1});
    } else {
      it->total += record.val_error;
      ++it->count;
    }
  }
  const auto mean = [](const Agg& agg) { return agg.total / agg.count; };
  const Agg* best = &aggs.front();
  for (const Agg& agg : aggs) {
    const double lhs = mean(agg);
    const double rhs = mean(*best);
    if (lhs < rhs ||
        (lhs == rhs &&
         std::tuple(agg.point.n_samples, agg.point.n_hidden,
                    agg.point.learning_rate) <
             std::tuple(best->point.n_samples, best->point.n_hidden,
                        best->point.learning_rate))) {
      best = &agg;
    }
  }
  return best->point;
}

void write_report_csv(const SweepReport& report, std::ostream& out) {
  out << "lr,n_hidden,n_samples,rep,val_error,raw_score\n";
  for (const auto& record : report.records) {
    out << format_double(record.point.learning_rate) << ','
        << record.point.n_hidden << ',' << record.point.n_samples << ','
        << record.repetition << ',' << format_double(record.val_error) << ','
        << record.raw_score << '\n';
  }
}

SweepReport read_report_csv(std::istream& in, int test_size) {
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("lr,n_hidden,n_samples,rep,val_error,raw_score", 0) != 0) {
    throw IoError("report CSV: missing or malformed header");
  }
  SweepReport report;
  report.test_size = test_size;
  report.n_repetitions = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    SweepRecord record;
    try {
      std::getline(row, field, ',');
      record.point.learning_rate = std::stod(field);
      std::getline(row, field, ',');
      record.point.n_hidden = std::stoi(field);
      std::getline(row, field, ',');
      record.point.n_samples = std::stoi(field);
      std::getline(row, field, ',');
      record.repetition = std::stoi(field);
      std::getline(row, field, ',');
      record.val_error = std::stod(field);
      std::getline(row, field, ',');
      record.raw_score = std::stoi(field);
    } catch (const std::exception&) {
      throw IoError("report CSV: malformed row '" + line + "'");
    }
    report.n_repetitions =
        std::max(report.n_repetitions, record.repetition + 1);
    report.records.push_back(record);

    const auto add_unique = [](auto& list, auto value) {
      if (std::find(list.begin(), list.end(), value) == list.end()) {
        list.push_back(value);
      }
    };
    add_unique(report.grid.learning_rates, record.point.learning_rate);
    add_unique(report.grid.n_hidden, record.point.n_hidden);
    add_unique(report.grid.n_samples, record.point.n_samples);
  }
  return report;
}

std::string report_summary_json(const SweepReport& report) {
  nlohmann::json doc;
  doc["master_seed"] = report.master_seed;
  doc["test_size"] = report.test_size;
  doc["n_repetitions"] = report.n_repetitions;
  doc["n_records"] = report.records.size();

  // raw-score frequency table per learning rate, scores 0..test_size
  auto& histogram = doc["histogram"] = nlohmann::json::array();
  for (double lr : report.grid.learning_rates) {
    std::vector<int> freq(static_cast<std::size_t>(report.test_size) + 1, 0);
    for (const auto& record : report.records) {
      if (record.point.learning_rate == lr) {
        ++freq[static_cast<std::size_t>(record.raw_score)];
      }
    }
    histogram.push_back({{"learning_rate", lr}, {"frequency", freq}});
  }

  if (!report.records.empty()) {
    const GridPoint best = best_hyperparameters(report);
    doc["best"] = {{"learning_rate", best.learning_rate},
                   {"n_hidden", best.n_hidden},
                   {"n_samples", best.n_samples}};
  }
  return doc.dump(2);
}

}  // namespace qbm

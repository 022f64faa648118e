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

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qbm/dataset.hpp"
#include "qbm/errors.hpp"
#include "qbm/features.hpp"
#include "qbm/model_io.hpp"
#include "qbm/pipeline.hpp"
#include "qbm/sa_sampler.hpp"
#include "qbm/sampler.hpp"

namespace fs = std::filesystem;

namespace {

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return {buf, ptr};
}

struct SamplerFlags {
  std::string choice = "gibbs";
  std::size_t burn_in = 100;
  qbm::AnnealSchedule schedule;
  int chimera_rows = 16;
  int chimera_cols = 16;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--sampler", choice, "Negative-phase sampler")
        ->check(CLI::IsMember({"exact", "gibbs", "sa-chimera"}))
        ->capture_default_str();
    cmd->add_option("--burn-in", burn_in, "Gibbs burn-in sweeps")
        ->capture_default_str();
    cmd->add_option("--sa-t-start", schedule.t_start)->capture_default_str();
    cmd->add_option("--sa-t-end", schedule.t_end)->capture_default_str();
    cmd->add_option("--sa-steps", schedule.n_steps)->capture_default_str();
    cmd->add_option("--chimera-rows", chimera_rows)->capture_default_str();
    cmd->add_option("--chimera-cols", chimera_cols)->capture_default_str();
  }

  std::unique_ptr<qbm::Sampler> make() const {
    if (choice == "exact") return std::make_unique<qbm::ExactSampler>();
    if (choice == "gibbs") return std::make_unique<qbm::GibbsSampler>(burn_in);
    return std::make_unique<qbm::SaChimeraSampler>(chimera_rows, chimera_cols,
                                                   4, schedule);
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw qbm::IoError("cannot write " + path.string());
  out << text;
}

fs::path checkpoint_path(const fs::path& dir, const qbm::GridPoint& point,
                         int rep) {
  return dir / ("lr" + format_double(point.learning_rate) + "_h" +
                std::to_string(point.n_hidden) + "_s" +
                std::to_string(point.n_samples) + "_r" + std::to_string(rep) +
                ".json");
}

int run_synth(const qbm::SyntheticSpec& spec, const fs::path& out_matrix,
              const fs::path& out_labels) {
  const qbm::ExpressionDataset dataset = qbm::generate_synthetic(spec);
  qbm::save_expression_csv(dataset, out_matrix, out_labels);
  int n_class0 = 0;
  for (int label : dataset.labels) n_class0 += label == 0 ? 1 : 0;
  std::cout << "wrote " << dataset.n_patients() << " patients x "
            << dataset.n_genes() << " genes (" << n_class0 << " "
            << dataset.class_names[0] << ", "
            << dataset.n_patients() - n_class0 << " "
            << dataset.class_names[1] << ")\n"
            << "matrix: " << out_matrix.string() << "\n"
            << "labels: " << out_labels.string() << "\n";
  return 0;
}

int run_features(const fs::path& matrix, const fs::path& labels, int k,
                 const fs::path& out_matrix, const fs::path& out_labels,
                 const fs::path& out_scores) {
  const qbm::ExpressionDataset dataset =
      qbm::load_expression_csv(matrix, labels);
  const qbm::FeatureScores scores = qbm::fisher_score(dataset);
  const std::vector<int> top = qbm::select_top_k(scores, k);
  const qbm::ExpressionDataset reduced = dataset.select_genes(top);
  qbm::save_expression_csv(reduced, out_matrix, out_labels);

  std::ostringstream table;
  table << "rank,gene_index,gene_id,score\n";
  for (std::size_t rank = 0; rank < scores.ranking.size(); ++rank) {
    const int g = scores.ranking[rank];
    table << rank << ',' << g << ','
          << dataset.gene_ids[static_cast<std::size_t>(g)] << ','
          << format_double(scores.scores[static_cast<std::size_t>(g)]) << '\n';
  }
  write_text(out_scores, table.str());
  std::cout << "selected top " << k << " of " << dataset.n_genes()
            << " genes\nreduced matrix: " << out_matrix.string()
            << "\nscores: " << out_scores.string() << "\n";
  return 0;
}

int run_sweep(const fs::path& matrix, const fs::path& labels, int top_k,
              qbm::GridSpec grid, const SamplerFlags& sampler_flags,
              qbm::PipelineConfig config, std::uint64_t seed,
              const fs::path& out_csv, const fs::path& out_json,
              const std::string& checkpoint_dir) {
  qbm::ExpressionDataset dataset = qbm::load_expression_csv(matrix, labels);
  if (top_k > 0) {
    dataset = dataset.select_genes(
        qbm::select_top_k(qbm::fisher_score(dataset), top_k));
  }

  if (!checkpoint_dir.empty()) {
    fs::create_directories(checkpoint_dir);
    config.try_resume = [checkpoint_dir](const qbm::GridPoint& point, int rep,
                                         qbm::SweepRecord& record) {
      const fs::path path = checkpoint_path(checkpoint_dir, point, rep);
      std::ifstream in(path);
      if (!in) return false;
      nlohmann::json doc;
      in >> doc;
      record.point = point;
      record.repetition = rep;
      record.val_error = doc.at("val_error").get<double>();
      record.raw_score = doc.at("raw_score").get<int>();
      return true;
    };
    config.on_record = [checkpoint_dir](const qbm::SweepRecord& record) {
      nlohmann::json doc;
      doc["lr"] = record.point.learning_rate;
      doc["n_hidden"] = record.point.n_hidden;
      doc["n_samples"] = record.point.n_samples;
      doc["rep"] = record.repetition;
      doc["val_error"] = record.val_error;
      doc["raw_score"] = record.raw_score;
      write_text(checkpoint_path(checkpoint_dir, record.point, record.repetition),
                 doc.dump(2) + "\n");
    };
  }

  std::cout << "planned runs: " << grid.size() * config.n_repetitions << " ("
            << grid.size() << " grid points x " << config.n_repetitions
            << " repetitions)\n";

  const auto sampler = sampler_flags.make();
  const qbm::SweepReport report =
      qbm::run_grid(dataset, grid, *sampler, config, seed);

  {
    std::ostringstream csv;
    qbm::write_report_csv(report, csv);
    write_text(out_csv, csv.str());
  }
  write_text(out_json, qbm::report_summary_json(report) + "\n");

  const qbm::GridPoint best = qbm::best_hyperparameters(report);
  std::cout << "best hyperparameters: lr=" << format_double(best.learning_rate)
            << " hidden=" << best.n_hidden << " samples=" << best.n_samples
            << "\nreport csv: " << out_csv.string()
            << "\nreport json: " << out_json.string() << "\n";
  return 0;
}

int run_train(const fs::path& matrix, const fs::path& labels, int top_k,
              const qbm::Hyperparameters& hyper, int n_replicas,
              const SamplerFlags& sampler_flags, const fs::path& out_model) {
  const qbm::ExpressionDataset full = qbm::load_expression_csv(matrix, labels);

  qbm::TrainedModel model;
  model.n_genes_total = static_cast<int>(full.n_genes());
  model.class_names = full.class_names;
  model.clamp.n_classes = static_cast<int>(full.class_names.size());
  if (top_k > 0) {
    model.feature_indices =
        qbm::select_top_k(qbm::fisher_score(full), top_k);
  } else {
    model.feature_indices.resize(full.n_genes());
    for (int g = 0; g < full.n_genes(); ++g) model.feature_indices[g] = g;
  }
  for (int g : model.feature_indices) {
    model.feature_gene_ids.push_back(full.gene_ids[static_cast<std::size_t>(g)]);
  }

  const qbm::ExpressionDataset reduced = full.select_genes(model.feature_indices);
  model.normalizer = qbm::fit_normalizer(reduced.values);
  const Eigen::MatrixXd normalized =
      qbm::apply_normalizer(model.normalizer, reduced.values);

  const auto sampler = sampler_flags.make();
  model.params = qbm::train_rbm(normalized, reduced.labels, model.clamp,
                                *sampler, hyper, n_replicas);
  qbm::save_model(model, out_model);
  std::cout << "trained on " << reduced.n_patients() << " patients, "
            << reduced.n_genes() << " features, sampler "
            << sampler->name() << "\nmodel: " << out_model.string() << "\n";
  return 0;
}

int run_classify(const fs::path& model_path, const fs::path& input_path) {
  const qbm::TrainedModel model = qbm::load_model(model_path);

  std::ifstream in(input_path);
  if (!in) throw qbm::IoError("cannot open " + input_path.string());
  std::string line;
  int row_index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
    std::vector<double> values;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, delim)) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw qbm::IoError("non-numeric value '" + field + "' in " +
                           input_path.string());
      }
    }
    Eigen::VectorXd raw(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
      raw[static_cast<Eigen::Index>(i)] = values[i];
    }
    const auto [cls, probs] = model.classify_raw(raw);
    std::cout << "row " << row_index++ << ": "
              << model.class_names[static_cast<std::size_t>(cls)]
              << " (clamp probabilities:";
    for (Eigen::Index c = 0; c < probs.size(); ++c) {
      std::cout << ' ' << format_double(probs[c]);
    }
    std::cout << ")\n";
  }
  return 0;
}

int run_report(const fs::path& csv_path, int test_size,
               const fs::path& out_json) {
  std::ifstream in(csv_path);
  if (!in) throw qbm::IoError("cannot open " + csv_path.string());
  const qbm::SweepReport report = qbm::read_report_csv(in, test_size);
  write_text(out_json, qbm::report_summary_json(report) + "\n");
  std::cout << "summary: " << out_json.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clamped RBM classifier with annealer-style samplers"};
  app.require_subcommand(1);

  // synth
  qbm::SyntheticSpec spec;
  std::string synth_matrix = "synthetic_matrix.csv";
  std::string synth_labels = "synthetic_labels.csv";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--n-patients", spec.n_patients)->capture_default_str();
  synth->add_option("--n-genes", spec.n_genes)->capture_default_str();
  synth->add_option("--n-informative", spec.n_informative)->capture_default_str();
  synth->add_option("--separation", spec.class_separation)->capture_default_str();
  synth->add_option("--balance", spec.class_balance)->capture_default_str();
  synth->add_option("--seed", spec.seed)->capture_default_str();
  synth->add_option("--out-matrix", synth_matrix)->capture_default_str();
  synth->add_option("--out-labels", synth_labels)->capture_default_str();

  // features
  std::string feat_matrix, feat_labels;
  std::string feat_out_matrix = "reduced_matrix.csv";
  std::string feat_out_labels = "reduced_labels.csv";
  std::string feat_out_scores = "fisher_scores.csv";
  int feat_k = 10;
  auto* features = app.add_subcommand(
      "features", "Fisher-score feature selection to the top k genes");
  features->add_option("--matrix", feat_matrix)->required();
  features->add_option("--labels", feat_labels)->required();
  features->add_option("--k", feat_k)->capture_default_str();
  features->add_option("--out-matrix", feat_out_matrix)->capture_default_str();
  features->add_option("--out-labels", feat_out_labels)->capture_default_str();
  features->add_option("--out-scores", feat_out_scores)->capture_default_str();

  // sweep
  std::string sweep_matrix, sweep_labels;
  std::string sweep_csv = "sweep_report.csv";
  std::string sweep_json = "sweep_summary.json";
  std::string checkpoint_dir;
  int sweep_top_k = 0;
  std::uint64_t sweep_seed = 0;
  qbm::GridSpec grid = qbm::GridSpec::full_grid();
  qbm::PipelineConfig config;
  SamplerFlags sweep_sampler;
  auto* sweep = app.add_subcommand(
      "sweep", "Hyperparameter sweep: partition, train, validate, test");
  sweep->add_option("--matrix", sweep_matrix)->required();
  sweep->add_option("--labels", sweep_labels)->required();
  sweep->add_option("--top-k", sweep_top_k,
                    "Fisher-select this many genes first (0 = use all)")
      ->capture_default_str();
  sweep->add_option("--lr", grid.learning_rates, "Learning rate grid")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--hidden", grid.n_hidden, "Hidden unit grid")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--samples", grid.n_samples, "Negative sample count grid")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--sizes", config.sizes, "train,validation,test sizes")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--reps", config.n_repetitions)->capture_default_str();
  sweep->add_option("--epochs", config.n_epochs)->capture_default_str();
  sweep->add_option("--replicas", config.n_replicas)->capture_default_str();
  sweep->add_option("--jobs", config.n_jobs, "Parallel grid runs")
      ->capture_default_str();
  sweep->add_option("--seed", sweep_seed)->capture_default_str();
  sweep->add_option("--out-csv", sweep_csv)->capture_default_str();
  sweep->add_option("--out-json", sweep_json)->capture_default_str();
  sweep->add_option("--checkpoint-dir", checkpoint_dir,
                    "Resume finished grid points from this directory");
  sweep_sampler.add_to(sweep);

  // train
  std::string train_matrix, train_labels;
  std::string train_model = "model.json";
  int train_top_k = 10;
  int train_replicas = 1000;
  qbm::Hyperparameters hyper;
  SamplerFlags train_sampler;
  auto* train = app.add_subcommand(
      "train", "Train one model on the full input and save it");
  train->add_option("--matrix", train_matrix)->required();
  train->add_option("--labels", train_labels)->required();
  train->add_option("--top-k", train_top_k, "0 = use all genes")
      ->capture_default_str();
  train->add_option("--lr", hyper.learning_rate)->capture_default_str();
  train->add_option("--hidden", hyper.n_hidden)->capture_default_str();
  train->add_option("--samples", hyper.n_samples)->capture_default_str();
  train->add_option("--epochs", hyper.n_epochs)->capture_default_str();
  train->add_option("--replicas", train_replicas)->capture_default_str();
  train->add_option("--seed", hyper.seed)->capture_default_str();
  train->add_option("--out-model", train_model)->capture_default_str();
  train_sampler.add_to(train);

  // classify
  std::string classify_model, classify_input;
  auto* classify = app.add_subcommand(
      "classify", "Classify raw patient vectors with a saved model");
  classify->add_option("--model", classify_model)->required();
  classify->add_option("--input", classify_input)->required();

  // report
  std::string report_csv, report_json = "sweep_summary.json";
  int report_test_size = 14;
  auto* report = app.add_subcommand(
      "report", "Rebuild the JSON summary from a sweep CSV");
  report->add_option("--csv", report_csv)->required();
  report->add_option("--test-size", report_test_size)->capture_default_str();
  report->add_option("--out-json", report_json)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(spec, synth_matrix, synth_labels);
    if (features->parsed()) {
      return run_features(feat_matrix, feat_labels, feat_k, feat_out_matrix,
                          feat_out_labels, feat_out_scores);
    }
    if (sweep->parsed()) {
      return run_sweep(sweep_matrix, sweep_labels, sweep_top_k, grid,
                       sweep_sampler, config, sweep_seed, sweep_csv,
                       sweep_json, checkpoint_dir);
    }
    if (train->parsed()) {
      return run_train(train_matrix, train_labels, train_top_k, hyper,
                       train_replicas, train_sampler, train_model);
    }
    if (classify->parsed()) return run_classify(classify_model, classify_input);
    if (report->parsed()) return run_report(report_csv, report_test_size, report_json);
  } catch (const qbm::InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const qbm::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const qbm::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

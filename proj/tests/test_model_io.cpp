#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qbm/errors.hpp"
#include "qbm/model_io.hpp"
#include "qbm/pipeline.hpp"

using namespace qbm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qbm_model_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

TrainedModel make_model() {
  SyntheticSpec spec;
  spec.n_patients = 20;
  spec.n_genes = 12;
  spec.n_informative = 3;
  spec.seed = 4;
  const ExpressionDataset d = generate_synthetic(spec);

  TrainedModel model;
  model.feature_indices = {0, 1, 2};
  model.n_genes_total = 12;
  model.class_names = d.class_names;
  model.clamp = ClampSpec{2};
  for (int g : model.feature_indices) {
    model.feature_gene_ids.push_back(d.gene_ids[static_cast<std::size_t>(g)]);
  }
  const ExpressionDataset reduced = d.select_genes(model.feature_indices);
  model.normalizer = fit_normalizer(reduced.values);

  Hyperparameters hyper;
  hyper.learning_rate = 0.75;
  hyper.n_hidden = 2;
  hyper.n_samples = 32;
  hyper.n_epochs = 2;
  hyper.seed = 9;
  const GibbsSampler sampler(10);
  model.params = train_rbm(apply_normalizer(model.normalizer, reduced.values),
                           d.labels, model.clamp, sampler, hyper, 50);
  return model;
}

}  // namespace

TEST_CASE("a saved model reloads to identical classifications") {
  const TrainedModel model = make_model();
  TempDir dir;
  const fs::path path = dir.path / "model.json";
  save_model(model, path);
  const TrainedModel loaded = load_model(path);

  CHECK(loaded.params.visible_bias.cwiseEqual(model.params.visible_bias).all());
  CHECK(loaded.params.hidden_bias.cwiseEqual(model.params.hidden_bias).all());
  CHECK(loaded.params.weights.cwiseEqual(model.params.weights).all());
  CHECK(loaded.normalizer.min.cwiseEqual(model.normalizer.min).all());
  CHECK(loaded.normalizer.max.cwiseEqual(model.normalizer.max).all());
  CHECK(loaded.feature_indices == model.feature_indices);
  CHECK(loaded.feature_gene_ids == model.feature_gene_ids);
  CHECK(loaded.class_names == model.class_names);
  CHECK(loaded.n_genes_total == 12);

  // classifications of raw vectors must agree bit-for-bit
  SyntheticSpec spec;
  spec.n_patients = 10;
  spec.n_genes = 12;
  spec.n_informative = 3;
  spec.seed = 5;
  const ExpressionDataset probe = generate_synthetic(spec);
  for (Eigen::Index r = 0; r < probe.n_patients(); ++r) {
    const auto [cls_a, probs_a] = model.classify_raw(probe.values.row(r));
    const auto [cls_b, probs_b] = loaded.classify_raw(probe.values.row(r));
    CHECK(cls_a == cls_b);
    CHECK(probs_a.cwiseEqual(probs_b).all());
    CHECK(cls_a >= 0);
    CHECK(cls_a < 2);
  }
}

TEST_CASE("classify_raw validates the raw vector length") {
  const TrainedModel model = make_model();
  try {
    model.classify_raw(Eigen::VectorXd::Zero(5));
    FAIL("expected InvalidInputError");
  } catch (const InvalidInputError& err) {
    CHECK(std::string(err.what()).find("12") != std::string::npos);
  }
}

TEST_CASE("loading a missing file raises IoError") {
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
}

TEST_CASE("malformed or wrong-version files are rejected") {
  TempDir dir;
  const fs::path garbage = dir.path / "garbage.json";
  {
    std::ofstream out(garbage);
    out << "this is not json";
  }
  CHECK_THROWS_AS(load_model(garbage), IoError);

  const TrainedModel model = make_model();
  const fs::path path = dir.path / "model.json";
  save_model(model, path);
  nlohmann::json doc;
  {
    std::ifstream in(path);
    in >> doc;
  }
  CHECK(doc.at("format_version") == 1);
  doc["format_version"] = 999;
  const fs::path future = dir.path / "future.json";
  {
    std::ofstream out(future);
    out << doc.dump();
  }
  CHECK_THROWS_AS(load_model(future), IoError);

  doc.erase("format_version");
  const fs::path missing = dir.path / "missing.json";
  {
    std::ofstream out(missing);
    out << doc.dump();
  }
  CHECK_THROWS_AS(load_model(missing), IoError);
}

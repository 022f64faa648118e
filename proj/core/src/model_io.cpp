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

#include "qbm/model_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr int kFormatVersion = 1;

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = arr[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

}  // namespace

std::pair<int, Eigen::VectorXd> TrainedModel::classify_raw(
    const Eigen::VectorXd& raw_genes) const {
  if (raw_genes.size() != n_genes_total) {
    throw InvalidInputError(
        "classify_raw: expected a vector of length " +
        std::to_string(n_genes_total) + ", got " +
        std::to_string(raw_genes.size()));
  }
  Eigen::VectorXd selected(static_cast<Eigen::Index>(feature_indices.size()));
  for (std::size_t k = 0; k < feature_indices.size(); ++k) {
    selected[static_cast<Eigen::Index>(k)] = raw_genes[feature_indices[k]];
  }
  return classify(params, apply_normalizer(normalizer, selected), clamp);
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  model.params.validate();
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["n_genes_total"] = model.n_genes_total;
  doc["class_names"] = model.class_names;
  doc["feature_indices"] = model.feature_indices;
  doc["feature_gene_ids"] = model.feature_gene_ids;
  doc["clamp"] = {{"n_classes", model.clamp.n_classes}};
  doc["normalizer"] = {{"min", vector_to_json(model.normalizer.min)},
                       {"max", vector_to_json(model.normalizer.max)}};
  nlohmann::json weights = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.params.weights.rows(); ++i) {
    weights.push_back(vector_to_json(model.params.weights.row(i)));
  }
  doc["rbm"] = {{"visible_bias", vector_to_json(model.params.visible_bias)},
                {"hidden_bias", vector_to_json(model.params.hidden_bias)},
                {"weights", weights}};

  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << doc.dump(2) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("model file " + path.string() + ": " + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw IoError("model file " + path.string() + ": unsupported version");
    }
    TrainedModel model;
    model.n_genes_total = doc.at("n_genes_total").get<int>();
    model.class_names = doc.at("class_names").get<std::vector<std::string>>();
    model.feature_indices = doc.at("feature_indices").get<std::vector<int>>();
    model.feature_gene_ids =
        doc.at("feature_gene_ids").get<std::vector<std::string>>();
    model.clamp.n_classes = doc.at("clamp").at("n_classes").get<int>();
    model.normalizer.min = vector_from_json(doc.at("normalizer").at("min"));
    model.normalizer.max = vector_from_json(doc.at("normalizer").at("max"));
    const auto& rbm = doc.at("rbm");
    model.params.visible_bias = vector_from_json(rbm.at("visible_bias"));
    model.params.hidden_bias = vector_from_json(rbm.at("hidden_bias"));
    const auto& weights = rbm.at("weights");
    model.params.weights.resize(model.params.visible_bias.size(),
                                model.params.hidden_bias.size());
    for (Eigen::Index i = 0; i < model.params.weights.rows(); ++i) {
      model.params.weights.row(i) =
          vector_from_json(weights.at(static_cast<std::size_t>(i)));
    }
    model.params.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("model file " + path.string() + ": " + e.what());
  }
}

}  // namespace qbm

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

#include "qbm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qbm/errors.hpp"
#include "qbm/rng.hpp"

namespace qbm {

namespace {

char detect_delimiter(const std::string& header) {
  const auto commas = std::count(header.begin(), header.end(), ',');
  const auto tabs = std::count(header.begin(), header.end(), '\t');
  if (commas == 0 && tabs == 0) {
    throw IoError("could not detect delimiter (expected comma or tab)");
  }
  return tabs > commas ? '\t' : ',';
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, delim)) fields.push_back(field);
  if (!line.empty() && line.back() == delim) fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_cell(const std::string& text, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw IoError("non-numeric cell at data row " + std::to_string(row + 1) +
                  ", column " + std::to_string(col + 1) + ": '" + text + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return {buf, ptr};
}

}  // namespace

void ExpressionDataset::validate() const {
  if (values.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw InvalidInputError("dataset: row count does not match label count");
  }
  if (values.cols() != static_cast<Eigen::Index>(gene_ids.size())) {
    throw InvalidInputError("dataset: column count does not match gene id count");
  }
  if (!patient_ids.empty() &&
      values.rows() != static_cast<Eigen::Index>(patient_ids.size())) {
    throw InvalidInputError("dataset: row count does not match patient id count");
  }
  for (int label : labels) {
    if (label != 0 && label != 1) {
      throw InvalidInputError("dataset: labels must be 0 or 1");
    }
  }
}

ExpressionDataset ExpressionDataset::select_genes(
    const std::vector<int>& gene_indices) const {
  ExpressionDataset out;
  out.patient_ids = patient_ids;
  out.labels = labels;
  out.class_names = class_names;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(gene_indices.size()));
  for (std::size_t k = 0; k < gene_indices.size(); ++k) {
    const int g = gene_indices[k];
    if (g < 0 || g >= n_genes()) {
      throw InvalidInputError("select_genes: gene index out of range");
    }
    out.values.col(static_cast<Eigen::Index>(k)) = values.col(g);
    out.gene_ids.push_back(gene_ids[static_cast<std::size_t>(g)]);
  }
  return out;
}

ExpressionDataset load_expression_csv(
    const std::filesystem::path& matrix_path,
    const std::filesystem::path& labels_path,
    const std::optional<std::vector<std::string>>& class_order) {
  std::ifstream matrix_file(matrix_path);
  if (!matrix_file) throw IoError("cannot open " + matrix_path.string());
  std::string line;
  if (!std::getline(matrix_file, line)) {
    throw IoError("empty matrix file " + matrix_path.string());
  }
  line = strip_cr(line);
  const char delim = detect_delimiter(line);
  const std::vector<std::string> header = split(line, delim);
  if (header.size() < 2) throw IoError("matrix header has no gene columns");

  ExpressionDataset dataset;
  dataset.gene_ids.assign(header.begin() + 1, header.end());
  {
    std::set<std::string> unique(dataset.gene_ids.begin(), dataset.gene_ids.end());
    if (unique.size() != dataset.gene_ids.size()) {
      throw IoError("duplicate gene identifier in " + matrix_path.string());
    }
  }

  std::vector<std::vector<double>> rows;
  std::set<std::string> seen_patients;
  while (std::getline(matrix_file, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, delim);
    if (fields.size() != header.size()) {
      throw IoError("data row " + std::to_string(rows.size() + 1) + " has " +
                    std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(header.size()));
    }
    if (!seen_patients.insert(fields[0]).second) {
      throw IoError("duplicate patient identifier '" + fields[0] + "'");
    }
    dataset.patient_ids.push_back(fields[0]);
    std::vector<double> row(fields.size() - 1);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      row[c - 1] = parse_cell(fields[c], rows.size(), c);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("matrix file has no data rows");

  // Labels file: patient_id<sep>class_name, optional "patient..." header.
  std::ifstream labels_file(labels_path);
  if (!labels_file) throw IoError("cannot open " + labels_path.string());
  std::map<std::string, std::string> label_of;
  bool first = true;
  while (std::getline(labels_file, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const char label_delim = line.find('\t') != std::string::npos ? '\t' : ',';
    const std::vector<std::string> fields = split(line, label_delim);
    if (fields.size() != 2) {
      throw IoError("labels row must be patient_id" + std::string(1, label_delim) +
                    "class_name: '" + line + "'");
    }
    if (first && (fields[0] == "patient" || fields[0] == "patient_id")) {
      first = false;
      continue;
    }
    first = false;
    if (!label_of.emplace(fields[0], fields[1]).second) {
      throw IoError("duplicate patient '" + fields[0] + "' in labels file");
    }
  }

  std::set<std::string> names;
  for (const auto& [patient, name] : label_of) names.insert(name);
  if (class_order) {
    dataset.class_names = *class_order;
    for (const auto& name : names) {
      if (std::find(dataset.class_names.begin(), dataset.class_names.end(),
                    name) == dataset.class_names.end()) {
        throw IoError("class '" + name + "' not in the given class order");
      }
    }
  } else {
    dataset.class_names.assign(names.begin(), names.end());  // alphabetical
  }
  if (dataset.class_names.size() != 2) {
    throw IoError("expected exactly 2 classes, found " +
                  std::to_string(dataset.class_names.size()));
  }

  for (const auto& [patient, name] : label_of) {
    if (!seen_patients.contains(patient)) {
      throw IoError("patient '" + patient + "' is in the labels file only");
    }
  }
  dataset.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(dataset.gene_ids.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto it = label_of.find(dataset.patient_ids[r]);
    if (it == label_of.end()) {
      throw IoError("patient '" + dataset.patient_ids[r] +
                    "' is missing from the labels file");
    }
    const auto pos = std::find(dataset.class_names.begin(),
                               dataset.class_names.end(), it->second);
    dataset.labels.push_back(
        static_cast<int>(pos - dataset.class_names.begin()));
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      dataset.values(static_cast<Eigen::Index>(r),
                     static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  dataset.validate();
  return dataset;
}

void save_expression_csv(const ExpressionDataset& dataset,
                         const std::filesystem::path& matrix_path,
                         const std::filesystem::path& labels_path) {
  dataset.validate();
  std::ofstream matrix_file(matrix_path);
  if (!matrix_file) throw IoError("cannot write " + matrix_path.string());
  matrix_file << "patient";
  for (const auto& gene : dataset.gene_ids) matrix_file << ',' << gene;
  matrix_file << '\n';
  for (Eigen::Index r = 0; r < dataset.n_patients(); ++r) {
    matrix_file << (dataset.patient_ids.empty()
                        ? "P" + std::to_string(r)
                        : dataset.patient_ids[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < dataset.n_genes(); ++c) {
      matrix_file << ',' << format_double(dataset.values(r, c));
    }
    matrix_file << '\n';
  }

  std::ofstream labels_file(labels_path);
  if (!labels_file) throw IoError("cannot write " + labels_path.string());
  labels_file << "patient,class\n";
  for (Eigen::Index r = 0; r < dataset.n_patients(); ++r) {
    const auto& patient = dataset.patient_ids.empty()
                              ? "P" + std::to_string(r)
                              : dataset.patient_ids[static_cast<std::size_t>(r)];
    labels_file << patient << ','
                << dataset.class_names[static_cast<std::size_t>(
                       dataset.labels[static_cast<std::size_t>(r)])]
                << '\n';
  }
}

void SyntheticSpec::validate() const {
  if (n_patients < 4 || n_genes < 1) {
    throw InvalidInputError("SyntheticSpec: need n_patients >= 4 and n_genes >= 1");
  }
  if (n_informative < 0 || n_informative > n_genes) {
    throw InvalidInputError("SyntheticSpec: n_informative out of range");
  }
  if (!(class_balance > 0.0 && class_balance < 1.0)) {
    throw InvalidInputError("SyntheticSpec: class_balance must be in (0,1)");
  }
  if (class_separation < 0.0) {
    throw InvalidInputError("SyntheticSpec: class_separation must be >= 0");
  }
}

ExpressionDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  ExpressionDataset dataset;
  dataset.class_names = {"Adenocarcinoma", "SquamousCellCarcinoma"};

  const int n_class0 = static_cast<int>(
      std::llround(spec.class_balance * spec.n_patients));
  dataset.labels.resize(static_cast<std::size_t>(spec.n_patients));
  for (int p = 0; p < spec.n_patients; ++p) {
    dataset.labels[static_cast<std::size_t>(p)] = p < n_class0 ? 0 : 1;
  }
  // interleave the classes so contiguous splits stay mixed
  Rng label_rng(derive_seed(spec.seed, {0x1ab}));
  label_rng.shuffle(dataset.labels);

  for (int p = 0; p < spec.n_patients; ++p) {
    dataset.patient_ids.push_back("P" + std::to_string(p));
  }
  for (int g = 0; g < spec.n_genes; ++g) {
    dataset.gene_ids.push_back("G" + std::to_string(g));
  }

  dataset.values.resize(spec.n_patients, spec.n_genes);
  Rng rng(derive_seed(spec.seed, {0x5e9}));
  for (int p = 0; p < spec.n_patients; ++p) {
    const double shift =
        dataset.labels[static_cast<std::size_t>(p)] == 1 ? spec.class_separation
                                                         : 0.0;
    for (int g = 0; g < spec.n_genes; ++g) {
      const double mean = g < spec.n_informative ? shift : 0.0;
      dataset.values(p, g) = mean + rng.normal();
    }
  }
  dataset.validate();
  return dataset;
}

}  // namespace qbm

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

#include "qbm/chimera.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

std::pair<int, int> ordered(int u, int v) {
  return u < v ? std::make_pair(u, v) : std::make_pair(v, u);
}

}  // namespace

bool ChimeraGraph::has_edge(int u, int v) const {
  const auto key = ordered(u, v);
  return std::find(edges.begin(), edges.end(), key) != edges.end();
}

ChimeraGraph build_chimera(int rows, int cols, int cell_size) {
  if (rows < 1 || cols < 1 || cell_size < 1) {
    throw InvalidInputError("build_chimera: dimensions must be >= 1");
  }
  ChimeraGraph g;
  g.rows = rows;
  g.cols = cols;
  g.cell_size = cell_size;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (int k0 = 0; k0 < cell_size; ++k0) {
        for (int k1 = 0; k1 < cell_size; ++k1) {
          g.edges.push_back(ordered(g.qubit(r, c, 0, k0), g.qubit(r, c, 1, k1)));
        }
      }
      for (int k = 0; k < cell_size; ++k) {
        if (r + 1 < rows) {
          g.edges.push_back(ordered(g.qubit(r, c, 0, k), g.qubit(r + 1, c, 0, k)));
        }
        if (c + 1 < cols) {
          g.edges.push_back(ordered(g.qubit(r, c, 1, k), g.qubit(r, c + 1, 1, k)));
        }
      }
    }
  }
  return g;
}

Embedding embed_rbm(int n_visible, int n_hidden, const ChimeraGraph& graph,
                    double chain_strength) {
  if (n_visible < 1 || n_hidden < 1) {
    throw InvalidInputError("embed_rbm: dimensions must be >= 1");
  }
  if (chain_strength <= 0.0) {
    throw InvalidInputError("embed_rbm: chain_strength must be positive");
  }
  const int L = graph.cell_size;
  const int rows_needed = (n_visible + L - 1) / L;
  const int cols_needed = (n_hidden + L - 1) / L;
  if (rows_needed > graph.rows) {
    throw CapacityError("embed_rbm: " + std::to_string(n_visible) +
                        " visible units need " + std::to_string(rows_needed) +
                        " cell rows, graph has " + std::to_string(graph.rows));
  }
  if (cols_needed > graph.cols) {
    throw CapacityError("embed_rbm: " + std::to_string(n_hidden) +
                        " hidden units need " + std::to_string(cols_needed) +
                        " cell columns, graph has " + std::to_string(graph.cols));
  }

  Embedding emb;
  emb.chain_strength = chain_strength;
  emb.graph_rows = graph.rows;
  emb.graph_cols = graph.cols;
  emb.cell_size = L;

  // Visible unit i: side-1 qubit (i/L, c, 1, i%L) for every used column; the
  // horizontal couplers make the chain a path. Hidden unit j runs vertically
  // on side 0. The chains of (i, j) meet inside cell (i/L, j/L).
  for (int i = 0; i < n_visible; ++i) {
    std::vector<int> chain;
    for (int c = 0; c < cols_needed; ++c) {
      chain.push_back(graph.qubit(i / L, c, 1, i % L));
    }
    emb.visible_chains.push_back(std::move(chain));
  }
  for (int j = 0; j < n_hidden; ++j) {
    std::vector<int> chain;
    for (int r = 0; r < rows_needed; ++r) {
      chain.push_back(graph.qubit(r, j / L, 0, j % L));
    }
    emb.hidden_chains.push_back(std::move(chain));
  }
  return emb;
}

double default_chain_strength(const RbmParameters& params) {
  const double a = params.visible_bias.size()
                       ? params.visible_bias.cwiseAbs().maxCoeff()
                       : 0.0;
  const double b = params.hidden_bias.size()
                       ? params.hidden_bias.cwiseAbs().maxCoeff()
                       : 0.0;
  const double w =
      params.weights.size() ? params.weights.cwiseAbs().maxCoeff() : 0.0;
  return 2.0 * std::max({a, b, w}) + 1.0;
}

double QuboProblem::objective(const std::vector<std::uint8_t>& x) const {
  double obj = offset;
  for (const auto& [i, coeff] : linear) {
    if (x[static_cast<std::size_t>(i)]) obj += coeff;
  }
  for (const auto& [edge, coeff] : quadratic) {
    if (x[static_cast<std::size_t>(edge.first)] &&
        x[static_cast<std::size_t>(edge.second)]) {
      obj += coeff;
    }
  }
  return obj;
}

std::vector<int> QuboProblem::variables() const {
  std::vector<int> vars;
  for (const auto& [i, coeff] : linear) vars.push_back(i);
  for (const auto& [edge, coeff] : quadratic) {
    vars.push_back(edge.first);
    vars.push_back(edge.second);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

QuboProblem rbm_to_qubo(const RbmParameters& params, const Embedding& embedding) {
  params.validate();
  const int n = static_cast<int>(params.n_visible());
  const int m = static_cast<int>(params.n_hidden());
  if (static_cast<int>(embedding.visible_chains.size()) != n ||
      static_cast<int>(embedding.hidden_chains.size()) != m) {
    throw InvalidInputError("rbm_to_qubo: embedding does not cover parameters");
  }
  const int L = embedding.cell_size;
  QuboProblem qubo;

  const auto add_chain = [&](const std::vector<int>& chain, double coeff) {
    const double share = coeff / static_cast<double>(chain.size());
    for (int q : chain) qubo.linear[q] += share;
    for (std::size_t e = 0; e + 1 < chain.size(); ++e) {
      // s*(x_p - x_q)^2 rewritten over binaries
      const auto key = chain[e] < chain[e + 1]
                           ? std::make_pair(chain[e], chain[e + 1])
                           : std::make_pair(chain[e + 1], chain[e]);
      qubo.linear[chain[e]] += embedding.chain_strength;
      qubo.linear[chain[e + 1]] += embedding.chain_strength;
      qubo.quadratic[key] += -2.0 * embedding.chain_strength;
    }
  };

  for (int i = 0; i < n; ++i) add_chain(embedding.visible_chains[i], -params.visible_bias[i]);
  for (int j = 0; j < m; ++j) add_chain(embedding.hidden_chains[j], -params.hidden_bias[j]);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      // chains of i and j intersect in cell (i/L, j/L)
      const int qv = embedding.visible_chains[i][j / L];
      const int qh = embedding.hidden_chains[j][i / L];
      const auto key = qv < qh ? std::make_pair(qv, qh) : std::make_pair(qh, qv);
      qubo.quadratic[key] += -params.weights(i, j);
    }
  }
  return qubo;
}

std::vector<std::uint8_t> embed_state(const Embedding& embedding,
                                      const ChimeraGraph& graph,
                                      const std::vector<std::uint8_t>& v,
                                      const std::vector<std::uint8_t>& h) {
  if (v.size() != embedding.visible_chains.size() ||
      h.size() != embedding.hidden_chains.size()) {
    throw InvalidInputError("embed_state: dimension mismatch");
  }
  std::vector<std::uint8_t> x(static_cast<std::size_t>(graph.num_qubits()), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (int q : embedding.visible_chains[i]) x[static_cast<std::size_t>(q)] = v[i];
  }
  for (std::size_t j = 0; j < h.size(); ++j) {
    for (int q : embedding.hidden_chains[j]) x[static_cast<std::size_t>(q)] = h[j];
  }
  return x;
}

std::string chimera_to_json(const ChimeraGraph& graph) {
  nlohmann::json doc;
  doc["rows"] = graph.rows;
  doc["cols"] = graph.cols;
  doc["cell_size"] = graph.cell_size;
  doc["num_qubits"] = graph.num_qubits();
  auto& edges = doc["edges"] = nlohmann::json::array();
  for (const auto& [u, v] : graph.edges) edges.push_back({u, v});
  return doc.dump(2);
}

std::string embedding_to_json(const Embedding& embedding) {
  nlohmann::json doc;
  doc["chain_strength"] = embedding.chain_strength;
  doc["graph"] = {{"rows", embedding.graph_rows},
                  {"cols", embedding.graph_cols},
                  {"cell_size", embedding.cell_size}};
  doc["visible_chains"] = embedding.visible_chains;
  doc["hidden_chains"] = embedding.hidden_chains;
  return doc.dump(2);
}

}  // namespace qbm

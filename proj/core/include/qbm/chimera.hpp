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

#ifndef QBM_CHIMERA_HPP
#define QBM_CHIMERA_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qbm/rbm.hpp"

namespace qbm {

/// Grid of K(cell_size, cell_size) unit cells. Side 0 of a cell couples
/// vertically to the neighboring row, side 1 horizontally to the neighboring
/// column. Qubit index: ((row*cols + col)*2 + side)*cell_size + k.
struct ChimeraGraph {
  int rows = 0;
  int cols = 0;
  int cell_size = 4;
  std::vector<std::pair<int, int>> edges;  // each (u,v) with u < v

  int num_qubits() const { return rows * cols * 2 * cell_size; }
  int qubit(int row, int col, int side, int k) const {
    return ((row * cols + col) * 2 + side) * cell_size + k;
  }
  bool has_edge(int u, int v) const;
};

ChimeraGraph build_chimera(int rows, int cols, int cell_size = 4);

/// Logical-to-physical map: visible unit i becomes a horizontal chain of
/// side-1 qubits, hidden unit j a vertical chain of side-0 qubits, so every
/// (visible, hidden) pair meets inside exactly one cell.
struct Embedding {
  std::vector<std::vector<int>> visible_chains;
  std::vector<std::vector<int>> hidden_chains;
  double chain_strength = 1.0;
  // dimensions of the graph the chains live on
  int graph_rows = 0;
  int graph_cols = 0;
  int cell_size = 4;
};

/// Throws CapacityError naming the limiting dimension when the RBM does not
/// fit on the graph.
Embedding embed_rbm(int n_visible, int n_hidden, const ChimeraGraph& graph,
                    double chain_strength);

/// 2 * max(|a|_inf, |b|_inf, |W|_inf) + 1.
double default_chain_strength(const RbmParameters& params);

/// Minimization objective sum_i linear_i x_i + sum_{i<j} quadratic_ij x_i x_j
/// + offset over binary x, indexed by physical qubit.
struct QuboProblem {
  std::map<int, double> linear;
  std::map<std::pair<int, int>, double> quadratic;  // keys (u,v), u < v
  double offset = 0.0;

  double objective(const std::vector<std::uint8_t>& x) const;
  std::vector<int> variables() const;
};

/// Physical QUBO for the embedded RBM: logical coefficients -a, -b, -W with
/// linear terms split evenly along chains, plus chain_strength * (x_p - x_q)^2
/// agreement penalties on every chain edge. On any unbroken-chain state the
/// objective equals energy(params, v, h).
QuboProblem rbm_to_qubo(const RbmParameters& params, const Embedding& embedding);

/// Assigns every chain qubit its logical value; penalties vanish, so
/// objective(embed_state(...)) == energy(params, v, h).
std::vector<std::uint8_t> embed_state(const Embedding& embedding,
                                      const ChimeraGraph& graph,
                                      const std::vector<std::uint8_t>& v,
                                      const std::vector<std::uint8_t>& h);

std::string chimera_to_json(const ChimeraGraph& graph);
std::string embedding_to_json(const Embedding& embedding);

}  // namespace qbm

#endif

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "qbm/chimera.hpp"
#include "qbm/errors.hpp"
#include "qbm/rng.hpp"

using namespace qbm;

namespace {

// Closed-form edge count: full bipartite couplers inside every cell plus
// one inter-cell coupler per chain index between grid neighbors.
long expected_edge_count(int rows, int cols, int l) {
  return static_cast<long>(rows) * cols * l * l +
         static_cast<long>(l) * (rows * (cols - 1) + cols * (rows - 1));
}

bool chain_connected(const std::vector<int>& chain, const ChimeraGraph& graph) {
  if (chain.empty()) return false;
  std::set<int> todo(chain.begin() + 1, chain.end());
  std::queue<int> frontier;
  frontier.push(chain.front());
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (auto it = todo.begin(); it != todo.end();) {
      if (graph.has_edge(std::min(u, *it), std::max(u, *it))) {
        frontier.push(*it);
        it = todo.erase(it);
      } else {
        ++it;
      }
    }
  }
  return todo.empty();
}

void check_embedding_invariants(const Embedding& emb, const ChimeraGraph& graph,
                                int n_visible, int n_hidden) {
  REQUIRE(emb.visible_chains.size() == static_cast<std::size_t>(n_visible));
  REQUIRE(emb.hidden_chains.size() == static_cast<std::size_t>(n_hidden));

  std::set<int> used;
  for (const auto* chains : {&emb.visible_chains, &emb.hidden_chains}) {
    for (const auto& chain : *chains) {
      REQUIRE(!chain.empty());
      CHECK(chain_connected(chain, graph));
      for (int q : chain) {
        CHECK(q >= 0);
        CHECK(q < graph.num_qubits());
        CHECK(used.insert(q).second);  // chains must be pairwise disjoint
      }
    }
  }

  // Every (visible, hidden) pair must share at least one physical coupler.
  for (const auto& vc : emb.visible_chains) {
    for (const auto& hc : emb.hidden_chains) {
      bool coupled = false;
      for (int p : vc) {
        for (int q : hc) {
          if (graph.has_edge(std::min(p, q), std::max(p, q))) coupled = true;
        }
      }
      CHECK(coupled);
    }
  }
}

RbmParameters random_params(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  RbmParameters p;
  p.visible_bias.resize(n);
  p.hidden_bias.resize(m);
  p.weights.resize(n, m);
  for (int i = 0; i < n; ++i) p.visible_bias[i] = rng.normal();
  for (int j = 0; j < m; ++j) p.hidden_bias[j] = rng.normal();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) p.weights(i, j) = rng.normal();
  return p;
}

}  // namespace

TEST_CASE("single-cell graph has 8 qubits and 16 edges") {
  const ChimeraGraph g = build_chimera(1, 1);
  CHECK(g.num_qubits() == 8);
  CHECK(g.edges.size() == 16);
  // all edges cross between side 0 (qubits 0..3) and side 1 (qubits 4..7)
  for (auto [u, v] : g.edges) {
    CHECK(u < 4);
    CHECK(v >= 4);
  }
  CHECK(g.has_edge(0, 4));
  CHECK(g.has_edge(3, 7));
  CHECK(!g.has_edge(0, 1));
}

TEST_CASE("2x2 grid has 32 qubits and 80 edges") {
  const ChimeraGraph g = build_chimera(2, 2);
  CHECK(g.num_qubits() == 32);
  CHECK(g.edges.size() == 80);
  // vertical inter-cell coupler: side-0 qubit k of cell (0,0) to same in (1,0)
  CHECK(g.has_edge(g.qubit(0, 0, 0, 2), g.qubit(1, 0, 0, 2)));
  // horizontal inter-cell coupler uses side 1
  CHECK(g.has_edge(g.qubit(0, 0, 1, 0), g.qubit(0, 1, 1, 0)));
  // no diagonal coupling
  CHECK(!g.has_edge(g.qubit(0, 0, 0, 0), g.qubit(1, 1, 0, 0)));
}

TEST_CASE("16x16 grid exposes 2048 qubits") {
  const ChimeraGraph g = build_chimera(16, 16);
  CHECK(g.num_qubits() == 2048);
  CHECK(g.edges.size() == static_cast<std::size_t>(expected_edge_count(16, 16, 4)));
}

TEST_CASE("edge count matches the closed form on random grid shapes") {
  Rng rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    const int rows = 1 + static_cast<int>(rng.index(5));
    const int cols = 1 + static_cast<int>(rng.index(5));
    const int l = 2 + static_cast<int>(rng.index(4));
    const ChimeraGraph g = build_chimera(rows, cols, l);
    CHECK(g.edges.size() ==
          static_cast<std::size_t>(expected_edge_count(rows, cols, l)));
    for (auto [u, v] : g.edges) CHECK(u < v);
    const std::set<std::pair<int, int>> unique(g.edges.begin(), g.edges.end());
    CHECK(unique.size() == g.edges.size());
  }
}

TEST_CASE("4+4 RBM embeds in a single cell with unit chains") {
  const ChimeraGraph g = build_chimera(1, 1);
  const Embedding emb = embed_rbm(4, 4, g, 2.0);
  check_embedding_invariants(emb, g, 4, 4);
  for (const auto& chain : emb.visible_chains) CHECK(chain.size() == 1);
  for (const auto& chain : emb.hidden_chains) CHECK(chain.size() == 1);
  CHECK(emb.chain_strength == 2.0);
}

TEST_CASE("8+4 RBM spans two rows of cells") {
  const ChimeraGraph g = build_chimera(2, 1);
  const Embedding emb = embed_rbm(8, 4, g, 3.0);
  check_embedding_invariants(emb, g, 8, 4);
  // hidden chains must stretch vertically across both cell rows
  for (const auto& chain : emb.hidden_chains) CHECK(chain.size() == 2);
}

TEST_CASE("12+3 RBM embeds on a 3x1 grid") {
  const ChimeraGraph g = build_chimera(3, 1);
  const Embedding emb = embed_rbm(12, 3, g, 1.5);
  check_embedding_invariants(emb, g, 12, 3);
}

TEST_CASE("oversized RBMs raise a capacity error naming the dimension") {
  const ChimeraGraph g = build_chimera(1, 1);
  try {
    embed_rbm(5, 2, g, 1.0);
    FAIL("expected CapacityError");
  } catch (const CapacityError& err) {
    CHECK(std::string(err.what()).find("visible") != std::string::npos);
  }
  try {
    embed_rbm(2, 5, g, 1.0);
    FAIL("expected CapacityError");
  } catch (const CapacityError& err) {
    CHECK(std::string(err.what()).find("hidden") != std::string::npos);
  }
}

TEST_CASE("1+1 QUBO carries the negated coefficients on one coupler") {
  RbmParameters p;
  p.visible_bias = Eigen::VectorXd::Constant(1, 1.0);
  p.hidden_bias = Eigen::VectorXd::Constant(1, 2.0);
  p.weights = Eigen::MatrixXd::Constant(1, 1, 3.0);
  const ChimeraGraph g = build_chimera(1, 1);
  const Embedding emb = embed_rbm(1, 1, g, 4.0);
  const QuboProblem qubo = rbm_to_qubo(p, emb);

  REQUIRE(emb.visible_chains[0].size() == 1);
  REQUIRE(emb.hidden_chains[0].size() == 1);
  const int vq = emb.visible_chains[0][0];
  const int hq = emb.hidden_chains[0][0];
  CHECK(qubo.linear.at(vq) == doctest::Approx(-1.0));
  CHECK(qubo.linear.at(hq) == doctest::Approx(-2.0));
  CHECK(qubo.quadratic.at({std::min(vq, hq), std::max(vq, hq)}) ==
        doctest::Approx(-3.0));
  CHECK(qubo.offset == doctest::Approx(0.0));

  std::vector<std::uint8_t> x(g.num_qubits(), 0);
  x[vq] = 1;
  x[hq] = 1;
  CHECK(qubo.objective(x) == doctest::Approx(-6.0));
}

TEST_CASE("default chain strength is 2*max-coefficient + 1") {
  RbmParameters p;
  p.visible_bias = (Eigen::VectorXd(2) << 0.5, -1.25).finished();
  p.hidden_bias = (Eigen::VectorXd(1) << 0.75).finished();
  p.weights = (Eigen::MatrixXd(2, 1) << -0.5, 1.0).finished();
  CHECK(default_chain_strength(p) == doctest::Approx(2.0 * 1.25 + 1.0));
}

TEST_CASE("embedded states reproduce the RBM energy exactly") {
  struct Shape {
    int n, m, rows, cols;
  };
  for (const Shape shape : {Shape{3, 3, 1, 1}, Shape{6, 4, 2, 1},
                            Shape{8, 4, 2, 2}, Shape{5, 7, 2, 2}}) {
    const RbmParameters p =
        random_params(shape.n, shape.m, 1000 + shape.n * 16 + shape.m);
    const ChimeraGraph g = build_chimera(shape.rows, shape.cols);
    const Embedding emb = embed_rbm(shape.n, shape.m, g, default_chain_strength(p));
    const QuboProblem qubo = rbm_to_qubo(p, emb);
    for (unsigned code = 0; code < (1U << (shape.n + shape.m)); ++code) {
      std::vector<std::uint8_t> v(shape.n), h(shape.m);
      for (int i = 0; i < shape.n; ++i) v[i] = (code >> i) & 1U;
      for (int j = 0; j < shape.m; ++j) h[j] = (code >> (shape.n + j)) & 1U;
      const std::vector<std::uint8_t> x = embed_state(emb, g, v, h);
      CHECK(std::abs(qubo.objective(x) - energy(p, v, h)) < 1e-9);
    }
  }
}

TEST_CASE("breaking a chain costs at least the chain strength") {
  const RbmParameters p = random_params(6, 4, 7);
  const ChimeraGraph g = build_chimera(2, 1);
  const double strength = default_chain_strength(p);
  const Embedding emb = embed_rbm(6, 4, g, strength);
  const QuboProblem qubo = rbm_to_qubo(p, emb);

  const std::vector<std::uint8_t> v{1, 0, 1, 1, 0, 0};
  const std::vector<std::uint8_t> h{0, 1, 1, 0};
  std::vector<std::uint8_t> x = embed_state(emb, g, v, h);
  const double base = qubo.objective(x);

  // flip one qubit inside a multi-qubit hidden chain
  const auto& chain = emb.hidden_chains[1];
  REQUIRE(chain.size() >= 2);
  x[chain[0]] ^= 1U;
  CHECK(qubo.objective(x) >
        base + strength - 2.0 * std::abs(p.hidden_bias[1]) - 1e-9);
}

TEST_CASE("graph and embedding serialize to well-formed JSON") {
  const ChimeraGraph g = build_chimera(2, 2);
  const auto graph_json = nlohmann::json::parse(chimera_to_json(g));
  CHECK(graph_json.at("rows") == 2);
  CHECK(graph_json.at("cols") == 2);
  CHECK(graph_json.at("cell_size") == 4);
  CHECK(graph_json.at("num_qubits") == 32);
  CHECK(graph_json.at("edges").size() == 80);

  const Embedding emb = embed_rbm(8, 4, build_chimera(2, 1), 2.5);
  const auto emb_json = nlohmann::json::parse(embedding_to_json(emb));
  CHECK(emb_json.at("visible_chains").size() == 8);
  CHECK(emb_json.at("hidden_chains").size() == 4);
  CHECK(emb_json.at("chain_strength") == doctest::Approx(2.5));
}

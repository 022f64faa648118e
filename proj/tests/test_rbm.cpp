#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qbm/errors.hpp"
#include "qbm/rbm.hpp"
#include "qbm/rng.hpp"
#include "qbm/sampler.hpp"

using namespace qbm;

namespace {

RbmParameters make_params(const std::vector<double>& a,
                          const std::vector<double>& b,
                          const std::vector<std::vector<double>>& w) {
  RbmParameters params;
  params.visible_bias = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
  params.hidden_bias = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  params.weights.resize(a.size(), b.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w[i].size(); ++j) {
      params.weights(i, j) = w[i][j];
    }
  }
  return params;
}

RbmParameters random_params(int n, int m, std::uint64_t seed, double scale) {
  Rng rng(seed);
  RbmParameters params;
  params.visible_bias.resize(n);
  params.hidden_bias.resize(m);
  params.weights.resize(n, m);
  for (int i = 0; i < n; ++i) params.visible_bias[i] = scale * rng.normal();
  for (int j = 0; j < m; ++j) params.hidden_bias[j] = scale * rng.normal();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) params.weights(i, j) = scale * rng.normal();
  }
  return params;
}

// Naive sum over explicit index loops, kept separate from the library path.
double energy_oracle(const RbmParameters& p, const std::vector<std::uint8_t>& v,
                     const std::vector<std::uint8_t>& h) {
  double e = 0.0;
  for (int i = 0; i < p.n_visible(); ++i) e -= p.visible_bias[i] * v[i];
  for (int j = 0; j < p.n_hidden(); ++j) e -= p.hidden_bias[j] * h[j];
  for (int i = 0; i < p.n_visible(); ++i) {
    for (int j = 0; j < p.n_hidden(); ++j) {
      e -= v[i] * p.weights(i, j) * h[j];
    }
  }
  return e;
}

}  // namespace

TEST_CASE("energy of the all-zero state is zero") {
  const RbmParameters p = random_params(3, 2, 1, 1.0);
  CHECK(energy(p, {0, 0, 0}, {0, 0}) == 0.0);
}

TEST_CASE("energy single-term sum") {
  const RbmParameters p = make_params({1.0}, {2.0}, {{3.0}});
  CHECK(energy(p, {1}, {1}) == doctest::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("energy matches the double-loop oracle on all 32 states") {
  const RbmParameters p = random_params(3, 2, 99, 1.0);
  for (unsigned code = 0; code < 32; ++code) {
    std::vector<std::uint8_t> v(3), h(2);
    for (int i = 0; i < 3; ++i) v[i] = (code >> i) & 1U;
    for (int j = 0; j < 2; ++j) h[j] = (code >> (3 + j)) & 1U;
    CHECK(energy(p, v, h) == doctest::Approx(energy_oracle(p, v, h)).epsilon(1e-12));
  }
}

TEST_CASE("energy rejects mismatched dimensions") {
  const RbmParameters p = random_params(3, 2, 1, 1.0);
  CHECK_THROWS_AS(energy(p, {0, 0}, {0, 0}), InvalidInputError);
}

TEST_CASE("init_params: zero biases, deterministic, weight scale 0.01") {
  const RbmParameters p1 = init_params(100, 100, 5);
  const RbmParameters p2 = init_params(100, 100, 5);
  CHECK(p1.visible_bias.isZero());
  CHECK(p1.hidden_bias.isZero());
  CHECK(p1.weights.cwiseEqual(p2.weights).all());

  const double mean = p1.weights.mean();
  const double sd = std::sqrt((p1.weights.array() - mean).square().mean());
  CHECK(sd > 0.008);
  CHECK(sd < 0.012);

  CHECK(!init_params(4, 3, 1).weights.cwiseEqual(init_params(4, 3, 2).weights).all());
}

TEST_CASE("train_batch with zero learning rate leaves parameters unchanged") {
  const RbmParameters p = random_params(3, 2, 7, 0.5);
  BinaryBatch batch;
  batch.replicas = {{1, 0, 1}, {0, 1, 1}};
  batch.n_features = 3;
  Hyperparameters hyper;
  hyper.learning_rate = 0.0;
  hyper.n_samples = 4;
  const RbmParameters updated = train_batch(p, batch, ExactSampler{}, hyper, 0);
  CHECK(updated.weights.cwiseEqual(p.weights).all());
  CHECK(updated.visible_bias.cwiseEqual(p.visible_bias).all());
  CHECK(updated.hidden_bias.cwiseEqual(p.hidden_bias).all());
}

TEST_CASE("train_batch with the exact sampler matches the finite-difference "
          "log-likelihood gradient") {
  const int n = 3, m = 2;
  RbmParameters p = random_params(n, m, 11, 0.6);
  std::vector<std::vector<std::uint8_t>> vs = {
      {1, 0, 1}, {1, 1, 0}, {0, 0, 1}, {1, 0, 1}};
  BinaryBatch batch;
  batch.replicas = vs;
  batch.n_features = n;
  Hyperparameters hyper;
  hyper.learning_rate = 0.3;
  hyper.n_samples = 1;

  const RbmParameters updated = train_batch(p, batch, ExactSampler{}, hyper, 0);

  const double step = 1e-4;
  const auto check_grad = [&](double* param, double update) {
    const double saved = *param;
    *param = saved + step;
    const double plus = batch_log_likelihood(p, vs);
    *param = saved - step;
    const double minus = batch_log_likelihood(p, vs);
    *param = saved;
    const double fd = hyper.learning_rate * (plus - minus) / (2.0 * step);
    CHECK(std::abs(update - fd) <=
          1e-3 * std::max(std::abs(fd), 1e-8));
  };

  for (int i = 0; i < n; ++i) {
    check_grad(&p.visible_bias[i], updated.visible_bias[i] - p.visible_bias[i]);
  }
  for (int j = 0; j < m; ++j) {
    check_grad(&p.hidden_bias[j], updated.hidden_bias[j] - p.hidden_bias[j]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      check_grad(&p.weights(i, j), updated.weights(i, j) - p.weights(i, j));
    }
  }
}

TEST_CASE("training on a constant batch raises its marginal monotonically") {
  RbmParameters p = init_params(3, 2, 3);
  BinaryBatch batch;
  batch.replicas.assign(8, {1, 1, 1});
  batch.n_features = 3;
  Hyperparameters hyper;
  hyper.learning_rate = 0.2;
  hyper.n_samples = 1;
  const ExactSampler sampler;

  double previous = visible_marginal(p, {1, 1, 1});
  for (int update = 0; update < 50; ++update) {
    p = train_batch(p, batch, sampler, hyper, update);
    const double current = visible_marginal(p, {1, 1, 1});
    CHECK(current > previous);
    previous = current;
  }
}

TEST_CASE("reconstruct: zero parameters give 0.5 everywhere") {
  RbmParameters p = make_params({0, 0}, {0}, {{0}, {0}});
  const Eigen::VectorXd out = reconstruct(p, Eigen::Vector2d(1.0, 0.0));
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("reconstruct: large bias saturates toward 1") {
  RbmParameters p = make_params({10.0, 0.0}, {0.0}, {{0.0}, {0.0}});
  const Eigen::VectorXd out = reconstruct(p, Eigen::Vector2d(0.0, 0.0));
  CHECK(out[0] > 1.0 - 1e-3);
}

TEST_CASE("reconstruct matches the hand-computed 2+1 pass") {
  // h = sigmoid(0.3 + 0.5) ; v0' = sigmoid(0.1 + 0.5 h) ; v1' = sigmoid(-0.2 - 0.4 h)
  RbmParameters p = make_params({0.1, -0.2}, {0.3}, {{0.5}, {-0.4}});
  const Eigen::VectorXd out = reconstruct(p, Eigen::Vector2d(1.0, 0.0));
  CHECK(out[0] == doctest::Approx(0.6094467466135771).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(0.3831995234322844).epsilon(1e-12));
}

TEST_CASE("reconstruct output stays strictly inside (0,1)") {
  const RbmParameters p = random_params(4, 3, 17, 3.0);
  Rng rng(5);
  Eigen::VectorXd v(4);
  for (int i = 0; i < 4; ++i) v[i] = rng.uniform();
  const Eigen::VectorXd out = reconstruct(p, v);
  for (int i = 0; i < 4; ++i) {
    CHECK(out[i] > 0.0);
    CHECK(out[i] < 1.0);
  }
}

TEST_CASE("classify collapses the larger clamp value") {
  // zero weights, clamp-unit biases chosen so the reconstructed clamp is
  // exactly [0.23, 0.48]
  const double logit23 = std::log(0.23 / 0.77);
  const double logit48 = std::log(0.48 / 0.52);
  RbmParameters p = make_params({0.0, logit23, logit48}, {0.0},
                                {{0.0}, {0.0}, {0.0}});
  const ClampSpec clamp{2};
  const auto [cls, probs] = classify(p, Eigen::VectorXd::Constant(1, 0.5), clamp);
  CHECK(probs[0] == doctest::Approx(0.23).epsilon(1e-9));
  CHECK(probs[1] == doctest::Approx(0.48).epsilon(1e-9));
  CHECK(cls == 1);
}

TEST_CASE("classify ties break toward the lower class index") {
  RbmParameters p = init_params(3, 2, 1);
  p.weights.setZero();
  const ClampSpec clamp{2};
  const auto [cls, probs] = classify(p, Eigen::VectorXd::Constant(1, 0.3), clamp);
  CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cls == 0);
}

TEST_CASE("classify rejects mismatched feature length") {
  const RbmParameters p = init_params(4, 2, 1);
  CHECK_THROWS_AS(classify(p, Eigen::VectorXd::Zero(4), ClampSpec{2}),
                  InvalidInputError);
}

TEST_CASE("clamp_error") {
  const Eigen::Vector2d truth(0.0, 1.0);
  CHECK(clamp_error(truth, truth) == 0.0);
  CHECK(clamp_error(Eigen::Vector2d(0.23, 0.48), truth) ==
        doctest::Approx(0.3233).epsilon(1e-12));
  CHECK(clamp_error(Eigen::Vector2d(1.0, 0.0), truth) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(clamp_error(Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0)),
                  InvalidInputError);
}

TEST_CASE("clamp spec encodings") {
  const ClampSpec clamp{2};
  CHECK(clamp.one_hot(0) == std::vector<std::uint8_t>{1, 0});
  CHECK(clamp.one_hot(1) == std::vector<std::uint8_t>{0, 1});
  CHECK(clamp.neutral().isOnes());
  CHECK_THROWS_AS(clamp.one_hot(2), InvalidInputError);
}

TEST_CASE("model trained to saturation on one class predicts it") {
  // two features + two clamp units, every patient is class 0
  const ClampSpec clamp{2};
  RbmParameters p = init_params(4, 2, 9);
  BinaryBatch batch;
  batch.replicas.assign(16, {1, 0, 1, 0});  // features [1,0], clamp [1,0]
  batch.n_features = 2;
  batch.n_clamp = 2;
  Hyperparameters hyper;
  hyper.learning_rate = 0.3;
  hyper.n_samples = 1;
  const ExactSampler sampler;
  for (int update = 0; update < 200; ++update) {
    p = train_batch(p, batch, sampler, hyper, update);
  }
  const auto [cls, probs] = classify(p, Eigen::Vector2d(1.0, 0.0), clamp);
  CHECK(cls == 0);
  CHECK(probs[0] > probs[1]);
}

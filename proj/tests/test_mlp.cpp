#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "risim/mlp.hpp"
#include "risim/rng.hpp"

using namespace risim;

namespace {

bool same(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

double numeric_loss(MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t,
                    double lambda) {
  Gradients unused;
  return loss_and_grad(model, x, t, lambda, unused);
}

}  // namespace

TEST_CASE("forward matches a hand computed two layer net") {
  MlpModel model;
  model.dims = {1, 1};
  model.weights = {Eigen::MatrixXd::Constant(1, 1, 0.5)};
  model.biases = {Eigen::VectorXd::Zero(1)};
  const Eigen::VectorXd y = forward(model, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(y(0) == doctest::Approx(0.46211715726000974).epsilon(1e-15));
}

TEST_CASE("relu hidden layers pass positives and clamp negatives") {
  MlpModel model;
  model.dims = {1, 2, 1};
  Eigen::MatrixXd w0(2, 1);
  w0 << 1.0, -1.0;
  Eigen::MatrixXd w1(1, 2);
  w1 << 1.0, 1.0;
  model.weights = {w0, w1};
  model.biases = {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1)};
  // x=2: hidden = relu(2, -2) = (2, 0), out = tanh(2)
  const Eigen::VectorXd y = forward(model, Eigen::VectorXd::Constant(1, 2.0));
  CHECK(y(0) == doctest::Approx(std::tanh(2.0)).epsilon(1e-15));
  const Eigen::VectorXd y2 = forward(model, Eigen::VectorXd::Constant(1, -3.0));
  CHECK(y2(0) == doctest::Approx(std::tanh(3.0)).epsilon(1e-15));
}

TEST_CASE("initialization is reproducible and bias free") {
  const std::vector<Eigen::Index> dims = {5, 7, 3};
  const MlpModel a = init_mlp(dims, 11);
  const MlpModel b = init_mlp(dims, 11);
  const MlpModel c = init_mlp(dims, 12);
  REQUIRE(a.weights.size() == 2);
  CHECK(same(a.weights[0], b.weights[0]));
  CHECK(same(a.weights[1], b.weights[1]));
  CHECK(!same(a.weights[0], c.weights[0]));
  for (const Eigen::VectorXd& bias : a.biases) CHECK(bias.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng = substream(31, 0, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    MlpModel model = init_mlp({4, 6, 5, 3}, 100 + static_cast<std::uint64_t>(trial));
    Eigen::MatrixXd x(4, 7), t(3, 7);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = std::tanh(normal(rng));
    const double lambda = 1e-3;
    Gradients grad;
    loss_and_grad(model, x, t, lambda, grad);
    const double eps = 1e-6;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      for (int probe = 0; probe < 6; ++probe) {
        const Eigen::Index i = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(
                                                             model.weights[l].size()));
        double& w = model.weights[l].data()[i];
        const double keep = w;
        w = keep + eps;
        const double up = numeric_loss(model, x, t, lambda);
        w = keep - eps;
        const double down = numeric_loss(model, x, t, lambda);
        w = keep;
        const double fd = (up - down) / (2 * eps);
        const double an = grad.weights[l].data()[i];
        CHECK(std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8}) < 1e-5);
      }
      const Eigen::Index i = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(
                                                           model.biases[l].size()));
      double& b = model.biases[l].data()[i];
      const double keep = b;
      b = keep + eps;
      const double up = numeric_loss(model, x, t, lambda);
      b = keep - eps;
      const double down = numeric_loss(model, x, t, lambda);
      b = keep;
      const double fd = (up - down) / (2 * eps);
      const double an = grad.biases[l].data()[i];
      CHECK(std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8}) < 1e-5);
    }
  }
}

TEST_CASE("regularization adds lambda times squared weights to the loss") {
  MlpModel model;
  model.dims = {1, 1};
  model.weights = {Eigen::MatrixXd::Constant(1, 1, 2.0)};
  model.biases = {Eigen::VectorXd::Zero(1)};
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, 1);
  const Eigen::MatrixXd t = Eigen::MatrixXd::Zero(1, 1);
  Gradients grad;
  double data_mse = -1.0;
  const double loss = loss_and_grad(model, x, t, 0.25, grad, &data_mse);
  CHECK(data_mse == doctest::Approx(0.0));
  CHECK(loss == doctest::Approx(1.0));  // 0.25 * 2^2
}

TEST_CASE("sgd and adam steps move parameters as prescribed") {
  TrainHyper hyper;
  hyper.learning_rate = 0.1;
  hyper.optimizer = TrainHyper::Optimizer::Sgd;
  MlpModel model;
  model.dims = {1, 1};
  model.weights = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
  model.biases = {Eigen::VectorXd::Constant(1, 0.5)};
  Gradients grad;
  grad.weights = {Eigen::MatrixXd::Constant(1, 1, 2.0)};
  grad.biases = {Eigen::VectorXd::Constant(1, -1.0)};
  OptimizerState state = make_optimizer_state(model);
  apply_step(model, grad, hyper, state);
  CHECK(model.weights[0](0, 0) == doctest::Approx(0.8));
  CHECK(model.biases[0](0) == doctest::Approx(0.6));

  hyper.optimizer = TrainHyper::Optimizer::Adam;
  MlpModel m2;
  m2.dims = {1, 1};
  m2.weights = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
  m2.biases = {Eigen::VectorXd::Zero(1)};
  OptimizerState s2 = make_optimizer_state(m2);
  apply_step(m2, grad, hyper, s2);
  // first adam step size is lr * g/(|g| + eps') ~ lr regardless of magnitude
  CHECK(m2.weights[0](0, 0) == doctest::Approx(1.0 - 0.1).epsilon(1e-6));
  apply_step(m2, grad, hyper, s2);
  CHECK(m2.weights[0](0, 0) < 0.9);
}

TEST_CASE("model averaging is exact for identical models") {
  const MlpModel a = init_mlp({3, 4, 2}, 55);
  for (std::size_t n : {2u, 3u, 4u, 5u}) {
    const std::vector<MlpModel> copies(n, a);
    const MlpModel avg = average(copies);
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
      CHECK(same(avg.weights[l], a.weights[l]));
      CHECK(same(avg.biases[l], a.biases[l]));
    }
  }
}

TEST_CASE("model averaging is invariant to participant order") {
  std::vector<MlpModel> models;
  for (std::uint64_t s = 0; s < 3; ++s) models.push_back(init_mlp({4, 5, 3}, 60 + s));
  const MlpModel ref = average(models);
  std::vector<std::size_t> perm = {0, 1, 2};
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::vector<MlpModel> shuffled;
    for (std::size_t i : perm) shuffled.push_back(models[i]);
    const MlpModel avg = average(shuffled);
    for (std::size_t l = 0; l < ref.weights.size(); ++l) {
      CHECK(same(avg.weights[l], ref.weights[l]));
      CHECK(same(avg.biases[l], ref.biases[l]));
    }
  }
}

TEST_CASE("averaging mixes distinct models arithmetically") {
  MlpModel a, b;
  a.dims = b.dims = {1, 1};
  a.weights = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
  b.weights = {Eigen::MatrixXd::Constant(1, 1, 3.0)};
  a.biases = {Eigen::VectorXd::Constant(1, -2.0)};
  b.biases = {Eigen::VectorXd::Constant(1, 4.0)};
  const MlpModel avg = average(std::vector<MlpModel>{a, b});
  CHECK(avg.weights[0](0, 0) == doctest::Approx(2.0));
  CHECK(avg.biases[0](0) == doctest::Approx(1.0));
}

TEST_CASE("checkpoints round trip bit exactly") {
  const MlpModel model = init_mlp({4, 5, 2}, 77);
  const std::string path = (std::filesystem::temp_directory_path() / "risim_ckpt_test.txt").string();
  save_checkpoint(model, path);
  const MlpModel back = load_checkpoint(path);
  REQUIRE(back.dims == model.dims);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    CHECK(same(back.weights[l], model.weights[l]));
    CHECK(same(back.biases[l], model.biases[l]));
  }
  std::remove(path.c_str());
}

TEST_CASE("checkpoint loader rejects garbage") {
  const std::string path = (std::filesystem::temp_directory_path() / "risim_bad_ckpt.txt").string();
  {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    std::fputs("MLPCKPT v1\n2 3\n1.0 2.0\n", fp);
    std::fclose(fp);
  }
  CHECK_THROWS(load_checkpoint(path));
  std::remove(path.c_str());
}

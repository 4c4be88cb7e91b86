#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace risim {

// Dense chain of affine layers. ReLU follows every affine except the last,
// which is squashed by tanh, so the activation pattern is implied by dims.
struct MlpModel {
  std::vector<Eigen::Index> dims;  // layer widths, at least [input, output]
  std::vector<Eigen::MatrixXd> weights;  // weights[l] is dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;

  std::size_t num_affine() const { return weights.size(); }
  Eigen::Index input_width() const { return dims.front(); }
  Eigen::Index output_width() const { return dims.back(); }
  void validate() const;
};

// He init on ReLU feeding layers, variance 1/fan_in on the tanh output layer,
// zero biases.
MlpModel init_mlp(const std::vector<Eigen::Index>& dims, std::uint64_t seed);

Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& x);
Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Mean squared error over the batch (columns are samples) plus
// lambda * sum of squared weights, biases excluded. Returns the loss and fills
// exact gradients; data_mse receives the unregularized term when non null.
double loss_and_grad(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t,
                     double lambda, Gradients& grad, double* data_mse = nullptr);

double mse_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t);

struct TrainHyper {
  enum class Optimizer { Sgd, Adam };
  double learning_rate = 1e-3;
  int epochs = 800;
  int batch_size = 64;
  double lambda = 1e-4;
  Optimizer optimizer = Optimizer::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  void validate() const;
};

struct OptimizerState {
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  long step_count = 0;
};

OptimizerState make_optimizer_state(const MlpModel& model);

// One SGD or Adam (bias corrected) update in place.
void apply_step(MlpModel& model, const Gradients& grad, const TrainHyper& hyper,
                OptimizerState& state);

// Parameter wise mean of models with identical dims. Summation is pairwise so
// averaging identical models reproduces them bit for bit at the scales used here.
MlpModel average(std::span<const MlpModel> models);

void save_checkpoint(const MlpModel& model, std::ostream& os);
void save_checkpoint(const MlpModel& model, const std::string& path);
MlpModel load_checkpoint(std::istream& is);
MlpModel load_checkpoint(const std::string& path);

}  // namespace risim

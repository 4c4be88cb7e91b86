#include "risim/mlp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "risim/rng.hpp"

namespace risim {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, bool last) {
  if (last) return z.array().tanh();
  return z.array().max(0.0);
}

void append_value(std::string& line, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

double next_value(std::istream& is, const char* what) {
  double v = 0.0;
  if (!(is >> v)) throw std::runtime_error(std::string("checkpoint: truncated ") + what);
  if (!std::isfinite(v)) throw std::runtime_error("checkpoint: non finite value");
  return v;
}

// Pairwise tree sum over [first, first+count); exact power of two averaging.
template <typename T>
T pairwise_sum(const T* first, std::size_t count) {
  if (count == 1) return first[0];
  const std::size_t half = count / 2;
  return pairwise_sum(first, half) + pairwise_sum(first + half, count - half);
}

}  // namespace

void MlpModel::validate() const {
  require(dims.size() >= 2, "mlp: needs at least input and output widths");
  for (Eigen::Index d : dims) require(d >= 1, "mlp: layer width must be positive");
  require(weights.size() == dims.size() - 1 && biases.size() == weights.size(),
          "mlp: layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    require(weights[l].rows() == dims[l + 1] && weights[l].cols() == dims[l],
            "mlp: weight shape mismatch");
    require(biases[l].size() == dims[l + 1], "mlp: bias shape mismatch");
  }
}

MlpModel init_mlp(const std::vector<Eigen::Index>& dims, std::uint64_t seed) {
  MlpModel model;
  model.dims = dims;
  require(dims.size() >= 2, "mlp: needs at least input and output widths");
  for (Eigen::Index d : dims) require(d >= 1, "mlp: layer width must be positive");
  std::mt19937_64 rng = substream(seed, 0, stream_tag::kInit);
  const std::size_t num_affine = dims.size() - 1;
  model.weights.resize(num_affine);
  model.biases.resize(num_affine);
  for (std::size_t l = 0; l < num_affine; ++l) {
    const double fan_in = static_cast<double>(dims[l]);
    const double var = (l + 1 < num_affine) ? 2.0 / fan_in : 1.0 / fan_in;
    std::normal_distribution<double> dist(0.0, std::sqrt(var));
    Eigen::MatrixXd& w = model.weights[l];
    w.resize(dims[l + 1], dims[l]);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
    model.biases[l] = Eigen::VectorXd::Zero(dims[l + 1]);
  }
  return model;
}

Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& x) {
  model.validate();
  require(x.rows() == model.input_width(), "forward: input width mismatch");
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < model.num_affine(); ++l) {
    Eigen::MatrixXd z = (model.weights[l] * a).colwise() + model.biases[l];
    a = activate(z, l + 1 == model.num_affine());
  }
  return a;
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x) {
  return forward_batch(model, x);
}

double loss_and_grad(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t,
                     double lambda, Gradients& grad, double* data_mse) {
  model.validate();
  require(x.rows() == model.input_width(), "loss: input width mismatch");
  require(t.rows() == model.output_width() && t.cols() == x.cols(), "loss: target shape mismatch");
  require(x.cols() >= 1, "loss: empty batch");
  require(std::isfinite(lambda) && lambda >= 0.0, "loss: lambda must be >= 0");

  const std::size_t num_affine = model.num_affine();
  std::vector<Eigen::MatrixXd> acts(num_affine + 1);
  acts[0] = x;
  for (std::size_t l = 0; l < num_affine; ++l) {
    Eigen::MatrixXd z = (model.weights[l] * acts[l]).colwise() + model.biases[l];
    acts[l + 1] = activate(z, l + 1 == num_affine);
  }

  const double inv_batch = 1.0 / static_cast<double>(x.cols());
  const double mse = (acts[num_affine] - t).squaredNorm() * inv_batch;
  if (data_mse) *data_mse = mse;
  double loss = mse;
  for (const Eigen::MatrixXd& w : model.weights) loss += lambda * w.squaredNorm();

  grad.weights.resize(num_affine);
  grad.biases.resize(num_affine);
  Eigen::MatrixXd delta = (2.0 * inv_batch * (acts[num_affine] - t).array() *
                           (1.0 - acts[num_affine].array().square()))
                              .matrix();
  for (std::size_t l = num_affine; l-- > 0;) {
    grad.weights[l] = delta * acts[l].transpose() + 2.0 * lambda * model.weights[l];
    grad.biases[l] = delta.rowwise().sum();
    if (l > 0)
      delta = ((model.weights[l].transpose() * delta).array() *
               (acts[l].array() > 0.0).cast<double>())
                  .matrix();
  }
  return loss;
}

double mse_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t) {
  require(t.rows() == model.output_width() && t.cols() == x.cols() && x.cols() >= 1,
          "loss: target shape mismatch");
  return (forward_batch(model, x) - t).squaredNorm() / static_cast<double>(x.cols());
}

void TrainHyper::validate() const {
  require(std::isfinite(learning_rate) && learning_rate > 0.0, "hyper: bad learning rate");
  require(epochs >= 0, "hyper: epochs must be >= 0");
  require(batch_size >= 1, "hyper: batch size must be >= 1");
  require(std::isfinite(lambda) && lambda >= 0.0, "hyper: lambda must be >= 0");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "hyper: betas outside [0,1)");
  require(std::isfinite(epsilon) && epsilon > 0.0, "hyper: epsilon must be positive");
}

OptimizerState make_optimizer_state(const MlpModel& model) {
  OptimizerState s;
  for (std::size_t l = 0; l < model.num_affine(); ++l) {
    s.m_w.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    s.v_w.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    s.m_b.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
    s.v_b.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
  }
  return s;
}

namespace {

// Moments of dead units decay geometrically towards the denormal range, where
// every update stalls the FPU; anything that small is exactly zero for Adam.
constexpr double kMomentFloor = 1e-300;

template <typename P, typename G>
void adam_update(P& param, const G& g, P& m, P& v, const TrainHyper& h, double bc1, double bc2) {
  m = h.beta1 * m + (1.0 - h.beta1) * g;
  v = (h.beta2 * v.array() + (1.0 - h.beta2) * g.array().square()).matrix();
  m = (m.array().abs() < kMomentFloor).select(0.0, m);
  v = (v.array() < kMomentFloor).select(0.0, v);
  param.array() -=
      h.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + h.epsilon);
}

}  // namespace

void apply_step(MlpModel& model, const Gradients& grad, const TrainHyper& hyper,
                OptimizerState& state) {
  hyper.validate();
  require(grad.weights.size() == model.num_affine() && grad.biases.size() == model.num_affine(),
          "step: gradient layer count mismatch");
  if (hyper.optimizer == TrainHyper::Optimizer::Sgd) {
    for (std::size_t l = 0; l < model.num_affine(); ++l) {
      model.weights[l] -= hyper.learning_rate * grad.weights[l];
      model.biases[l] -= hyper.learning_rate * grad.biases[l];
    }
    return;
  }
  ++state.step_count;
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step_count));
  for (std::size_t l = 0; l < model.num_affine(); ++l) {
    adam_update(model.weights[l], grad.weights[l], state.m_w[l], state.v_w[l], hyper, bc1, bc2);
    adam_update(model.biases[l], grad.biases[l], state.m_b[l], state.v_b[l], hyper, bc1, bc2);
  }
}

namespace {

bool same_parameters(const MlpModel& a, const MlpModel& b) {
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (!(a.weights[l].array() == b.weights[l].array()).all()) return false;
    if (!(a.biases[l].array() == b.biases[l].array()).all()) return false;
  }
  return true;
}

// Mean over a canonical (sorted) ordering, so the result depends on the
// multiset of values only, never on participant order.
double canonical_mean(std::vector<double>& buf) {
  std::sort(buf.begin(), buf.end());
  return pairwise_sum(buf.data(), buf.size()) / static_cast<double>(buf.size());
}

}  // namespace

MlpModel average(std::span<const MlpModel> models) {
  require(!models.empty(), "average: empty model list");
  for (const MlpModel& m : models) {
    m.validate();
    require(m.dims == models[0].dims, "average: dims mismatch");
  }
  MlpModel out = models[0];
  bool identical = true;
  for (const MlpModel& m : models) identical = identical && same_parameters(m, models[0]);
  // Identical replicas must average to themselves exactly; summing three equal
  // weights already rounds, so short-circuit instead.
  if (identical) return out;
  std::vector<double> buf(models.size());
  for (std::size_t l = 0; l < out.num_affine(); ++l) {
    for (Eigen::Index i = 0; i < out.weights[l].size(); ++i) {
      for (std::size_t m = 0; m < models.size(); ++m) buf[m] = models[m].weights[l].data()[i];
      out.weights[l].data()[i] = canonical_mean(buf);
    }
    for (Eigen::Index i = 0; i < out.biases[l].size(); ++i) {
      for (std::size_t m = 0; m < models.size(); ++m) buf[m] = models[m].biases[l].data()[i];
      out.biases[l].data()[i] = canonical_mean(buf);
    }
  }
  return out;
}

void save_checkpoint(const MlpModel& model, std::ostream& os) {
  model.validate();
  os << "MLPCKPT v1\n";
  std::string line;
  for (std::size_t i = 0; i < model.dims.size(); ++i) {
    if (i) line += ' ';
    line += std::to_string(model.dims[i]);
  }
  os << line << '\n';
  for (std::size_t l = 0; l < model.num_affine(); ++l) {
    const Eigen::MatrixXd& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      line.clear();
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        if (c) line += ' ';
        append_value(line, w(r, c));
      }
      line += '\n';
      os << line;
    }
    line.clear();
    for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) {
      if (i) line += ' ';
      append_value(line, model.biases[l](i));
    }
    line += '\n';
    os << line;
  }
  if (!os) throw std::runtime_error("checkpoint: write failed");
}

void save_checkpoint(const MlpModel& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
  save_checkpoint(model, os);
}

MlpModel load_checkpoint(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header != "MLPCKPT v1") throw std::runtime_error("checkpoint: bad header");
  std::string dims_line;
  std::getline(is, dims_line);
  std::istringstream ds(dims_line);
  MlpModel model;
  long d = 0;
  while (ds >> d) {
    if (d < 1) throw std::runtime_error("checkpoint: bad layer width");
    model.dims.push_back(d);
  }
  if (model.dims.size() < 2) throw std::runtime_error("checkpoint: bad dims line");
  for (std::size_t l = 0; l + 1 < model.dims.size(); ++l) {
    Eigen::MatrixXd w(model.dims[l + 1], model.dims[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = next_value(is, "weight");
    model.weights.push_back(std::move(w));
    Eigen::VectorXd b(model.dims[l + 1]);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = next_value(is, "bias");
    model.biases.push_back(std::move(b));
  }
  std::string tail;
  if (is >> tail) throw std::runtime_error("checkpoint: trailing data");
  model.validate();
  return model;
}

MlpModel load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  return load_checkpoint(is);
}

}  // namespace risim

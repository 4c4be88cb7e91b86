#include "risim/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "risim/rng.hpp"

namespace risim {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

// Epochs are numbered globally so an FL schedule of rounds x local epochs sees
// the same permutations as plain training of the same length.
void run_epochs(MlpModel& model, OptimizerState& state, const Eigen::MatrixXd& x,
                const Eigen::MatrixXd& t, const TrainHyper& hyper, int first_epoch, int epochs,
                std::vector<double>& curve) {
  const Eigen::Index n = x.cols();
  const Eigen::Index batch = std::min<Eigen::Index>(hyper.batch_size, n);
  std::vector<Eigen::Index> order(n);
  Eigen::MatrixXd xb(x.rows(), batch), tb(t.rows(), batch);
  Gradients grad;
  for (int e = 0; e < epochs; ++e) {
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng =
        substream(hyper.seed, static_cast<std::uint64_t>(first_epoch + e), stream_tag::kShuffle);
    std::shuffle(order.begin(), order.end(), rng);
    double mse_sum = 0.0;
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index b = std::min(batch, n - start);
      for (Eigen::Index j = 0; j < b; ++j) {
        xb.col(j) = x.col(order[start + j]);
        tb.col(j) = t.col(order[start + j]);
      }
      double mse = 0.0;
      loss_and_grad(model, xb.leftCols(b), tb.leftCols(b), hyper.lambda, grad, &mse);
      apply_step(model, grad, hyper, state);
      mse_sum += mse * static_cast<double>(b);
    }
    curve.push_back(mse_sum / static_cast<double>(n));
  }
}

void check_ind_set(std::span<const Dataset> datasets) {
  for (std::size_t m = 0; m < datasets.size(); ++m) {
    datasets[m].validate();
    require(!is_centralized(datasets[m].kind), "train: per ris variant needs per ris datasets");
    require(datasets[m].ris_index == m, "train: datasets must be ordered by ris index");
    require(datasets[m].kind == datasets[0].kind, "train: mixed encoder kinds");
    require(datasets[m].feature_width == datasets[0].feature_width &&
                datasets[m].target_width == datasets[0].target_width,
            "train: ragged dataset widths");
  }
}

}  // namespace

std::vector<Eigen::Index> full_dims(std::size_t input_width, std::size_t output_width,
                                    std::span<const Eigen::Index> hidden) {
  std::vector<Eigen::Index> dims;
  dims.push_back(static_cast<Eigen::Index>(input_width));
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(static_cast<Eigen::Index>(output_width));
  return dims;
}

Eigen::MatrixXd dataset_features(const Dataset& ds) {
  ds.validate();
  require(!ds.samples.empty(), "dataset_features: empty dataset");
  Eigen::MatrixXd x(ds.feature_width, ds.samples.size());
  std::vector<double> buf;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    buf = ds.samples[i].features;
    ds.norm.apply(buf);
    for (std::size_t j = 0; j < buf.size(); ++j) x(static_cast<Eigen::Index>(j), i) = buf[j];
  }
  return x;
}

Eigen::MatrixXd dataset_targets(const Dataset& ds) {
  require(!ds.samples.empty(), "dataset_targets: empty dataset");
  Eigen::MatrixXd t(ds.target_width, ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    for (std::size_t j = 0; j < ds.target_width; ++j)
      t(static_cast<Eigen::Index>(j), i) = ds.samples[i].target[j];
  return t;
}

TrainResult train_variant(std::span<const Dataset> datasets, std::span<const Eigen::Index> hidden,
                          const TrainHyper& hyper) {
  hyper.validate();
  require(!datasets.empty(), "train: no datasets");
  if (datasets.size() == 1)
    require(is_centralized(datasets[0].kind) || datasets[0].kind == EncoderKind::PosInd ||
                datasets[0].kind == EncoderKind::ChanInd,
            "train: bad dataset");
  if (datasets.size() > 1) check_ind_set(datasets);

  TrainResult out;
  for (std::size_t m = 0; m < datasets.size(); ++m) {
    const Dataset& ds = datasets[m];
    ds.validate();
    const std::vector<Eigen::Index> dims =
        full_dims(ds.feature_width, ds.target_width, hidden);
    MlpModel model = init_mlp(dims, derive_seed(hyper.seed, m));
    OptimizerState state = make_optimizer_state(model);
    const Eigen::MatrixXd x = dataset_features(ds);
    const Eigen::MatrixXd t = dataset_targets(ds);
    std::vector<double> curve;
    run_epochs(model, state, x, t, hyper, 0, hyper.epochs, curve);
    out.models.push_back(std::move(model));
    out.loss_curves.push_back(std::move(curve));
  }
  return out;
}

TrainResult train_federated(std::span<const Dataset> datasets,
                            std::span<const Eigen::Index> hidden, int rounds, int local_epochs,
                            const TrainHyper& hyper) {
  hyper.validate();
  require(rounds >= 0 && local_epochs >= 0, "train_federated: negative schedule");
  require(!datasets.empty(), "train_federated: no datasets");
  check_ind_set(datasets);

  const std::size_t num = datasets.size();
  const std::vector<Eigen::Index> dims =
      full_dims(datasets[0].feature_width, datasets[0].target_width, hidden);
  const MlpModel init = init_mlp(dims, derive_seed(hyper.seed, 0));
  std::vector<MlpModel> models(num, init);
  std::vector<OptimizerState> states;
  for (std::size_t m = 0; m < num; ++m) states.push_back(make_optimizer_state(init));
  std::vector<Eigen::MatrixXd> xs, ts;
  for (const Dataset& ds : datasets) {
    xs.push_back(dataset_features(ds));
    ts.push_back(dataset_targets(ds));
  }

  TrainResult out;
  out.loss_curves.resize(num);
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t m = 0; m < num; ++m)
      run_epochs(models[m], states[m], xs[m], ts[m], hyper, r * local_epochs, local_epochs,
                 out.loss_curves[m]);
    const MlpModel avg = average(models);
    for (MlpModel& model : models) model = avg;
  }
  out.models = std::move(models);
  return out;
}

void Predictor::validate() const {
  model.validate();
  require(!norm.empty(), "predictor: normalization missing");
  require(static_cast<Eigen::Index>(norm.width()) == model.input_width(),
          "predictor: normalization width mismatch");
  require(is_centralized(kind) == (ris_index == kAllRis), "predictor: ris index vs kind mismatch");
}

Predictor make_predictor(const Dataset& train, const MlpModel& model, double log_floor) {
  require(static_cast<std::size_t>(model.input_width()) == train.feature_width &&
              static_cast<std::size_t>(model.output_width()) == train.target_width,
          "predictor: model does not match dataset widths");
  Predictor pred;
  pred.kind = train.kind;
  pred.ris_index = train.ris_index;
  pred.log_floor = log_floor;
  pred.model = model;
  pred.norm = train.norm;
  pred.validate();
  return pred;
}

void ApproachPredictor::validate() const {
  require(num_ris >= 1 && groups_per_ris >= 1, "approach: empty shape");
  require(nets.size() == 1 || nets.size() == num_ris, "approach: wrong net count");
  for (const Predictor& p : nets) p.validate();
  if (nets.size() == 1 && num_ris > 1)
    require(is_centralized(nets[0].kind), "approach: single net must be centralized");
  const Eigen::Index want =
      static_cast<Eigen::Index>((nets.size() == 1 ? num_ris : 1) * groups_per_ris);
  for (const Predictor& p : nets)
    require(p.model.output_width() == want, "approach: output width mismatch");
}

PhaseConfig ApproachPredictor::infer(const Scene& scene, const Vec3& rx,
                                     const ChannelRealization& r) const {
  validate();
  PhaseConfig cfg = PhaseConfig::zeros(num_ris, groups_per_ris);
  const auto run_net = [&](const Predictor& p, std::size_t m) {
    std::vector<double> feats = is_position(p.kind)
                                    ? encode_position(scene, rx, p.kind, m)
                                    : encode_channel(r, p.kind, m, p.log_floor);
    p.norm.apply(feats);
    Eigen::VectorXd x(feats.size());
    for (std::size_t i = 0; i < feats.size(); ++i) x(static_cast<Eigen::Index>(i)) = feats[i];
    const Eigen::VectorXd y = forward(p.model, x);
    return std::vector<double>(y.data(), y.data() + y.size());
  };
  if (nets.size() == 1 && is_centralized(nets[0].kind)) {
    const std::vector<double> y = run_net(nets[0], kAllRis);
    return decode_output(y, num_ris, groups_per_ris);
  }
  for (std::size_t m = 0; m < num_ris; ++m) {
    const std::vector<double> y = run_net(nets[m], m);
    const PhaseConfig sub = decode_output(y, 1, groups_per_ris);
    for (std::size_t i = 0; i < groups_per_ris; ++i) cfg.at(m, i) = sub.at(0, i);
  }
  return cfg;
}

ApproachPredictor make_approach_predictor(std::span<const Dataset> train_sets,
                                          std::span<const MlpModel> models, std::size_t num_ris,
                                          std::size_t groups_per_ris, double log_floor) {
  require(train_sets.size() == models.size(), "approach: dataset/model count mismatch");
  ApproachPredictor ap;
  ap.num_ris = num_ris;
  ap.groups_per_ris = groups_per_ris;
  for (std::size_t i = 0; i < models.size(); ++i)
    ap.nets.push_back(make_predictor(train_sets[i], models[i], log_floor));
  ap.validate();
  return ap;
}

void save_predictor(const Predictor& pred, const std::string& ckpt_path,
                    const std::string& norm_path) {
  pred.validate();
  save_checkpoint(pred.model, ckpt_path);
  std::ofstream os(norm_path);
  if (!os) throw std::runtime_error("predictor: cannot open " + norm_path);
  os << "RISNORM v1 " << to_string(pred.kind) << ' ';
  if (pred.ris_index == kAllRis)
    os << '-';
  else
    os << pred.ris_index;
  char buf[32];
  auto put = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    os.write(buf, res.ptr - buf);
  };
  os << ' ' << pred.norm.width() << ' ';
  put(pred.log_floor);
  os << "\nmean";
  for (double v : pred.norm.mean) {
    os << ' ';
    put(v);
  }
  os << "\nscale";
  for (double v : pred.norm.scale) {
    os << ' ';
    put(v);
  }
  os << '\n';
  if (!os) throw std::runtime_error("predictor: write failed");
}

Predictor load_predictor(const std::string& ckpt_path, const std::string& norm_path) {
  Predictor pred;
  pred.model = load_checkpoint(ckpt_path);
  std::ifstream is(norm_path);
  if (!is) throw std::runtime_error("predictor: cannot open " + norm_path);
  std::string tag, version, kind_name, ris_field;
  if (!(is >> tag >> version >> kind_name >> ris_field) || tag != "RISNORM" || version != "v1")
    throw std::runtime_error("predictor: bad normalization header");
  pred.kind = encoder_from_string(kind_name);
  pred.ris_index = ris_field == "-" ? kAllRis : static_cast<std::size_t>(std::stoull(ris_field));
  std::size_t width = 0;
  if (!(is >> width >> pred.log_floor)) throw std::runtime_error("predictor: bad norm header");
  if (!(is >> tag) || tag != "mean") throw std::runtime_error("predictor: bad norm body");
  pred.norm.mean.resize(width);
  for (double& v : pred.norm.mean)
    if (!(is >> v)) throw std::runtime_error("predictor: truncated norm");
  if (!(is >> tag) || tag != "scale") throw std::runtime_error("predictor: bad norm body");
  pred.norm.scale.resize(width);
  for (double& v : pred.norm.scale)
    if (!(is >> v)) throw std::runtime_error("predictor: truncated norm");
  pred.validate();
  return pred;
}

}  // namespace risim

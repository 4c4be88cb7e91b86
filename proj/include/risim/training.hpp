#pragma once

#include "risim/dataset.hpp"
#include "risim/mlp.hpp"

namespace risim {

std::vector<Eigen::Index> full_dims(std::size_t input_width, std::size_t output_width,
                                    std::span<const Eigen::Index> hidden);

// Normalized feature matrix (feature x sample) and target matrix of a dataset.
Eigen::MatrixXd dataset_features(const Dataset& ds);
Eigen::MatrixXd dataset_targets(const Dataset& ds);

struct TrainResult {
  std::vector<MlpModel> models;                  // one (CEN) or M (IND, FL)
  std::vector<std::vector<double>> loss_curves;  // per model, per epoch data MSE
};

// CEN when a single dataset is given, IND otherwise (dataset m must carry
// ris_index m). Mini-batch training; the per-epoch sample permutation is drawn
// from substream(hyper.seed, epoch, shuffle) shared by all models so that
// identical datasets produce identical trajectories.
TrainResult train_variant(std::span<const Dataset> datasets, std::span<const Eigen::Index> hidden,
                          const TrainHyper& hyper);

// FedAvg: one shared initialization, rounds of local_epochs per RIS followed by
// a parameter-wise average; optimizer moments stay local. Returns the common
// final model replicated per RIS.
TrainResult train_federated(std::span<const Dataset> datasets,
                            std::span<const Eigen::Index> hidden, int rounds, int local_epochs,
                            const TrainHyper& hyper);

// A trained network bundled with the preprocessing it was fitted with.
struct Predictor {
  EncoderKind kind = EncoderKind::PosCen;
  std::size_t ris_index = kAllRis;
  double log_floor = kDefaultLogFloor;
  MlpModel model;
  Normalization norm;

  void validate() const;  // refuses models without normalization
};

Predictor make_predictor(const Dataset& train, const MlpModel& model,
                         double log_floor = kDefaultLogFloor);

// One approach: a single centralized net or one net per RIS, RIS major.
struct ApproachPredictor {
  std::size_t num_ris = 0;
  std::size_t groups_per_ris = 0;
  std::vector<Predictor> nets;

  void validate() const;
  PhaseConfig infer(const Scene& scene, const Vec3& rx, const ChannelRealization& r) const;
};

ApproachPredictor make_approach_predictor(std::span<const Dataset> train_sets,
                                          std::span<const MlpModel> models, std::size_t num_ris,
                                          std::size_t groups_per_ris,
                                          double log_floor = kDefaultLogFloor);

void save_predictor(const Predictor& pred, const std::string& ckpt_path,
                    const std::string& norm_path);
Predictor load_predictor(const std::string& ckpt_path, const std::string& norm_path);

}  // namespace risim

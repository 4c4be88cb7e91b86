#pragma once

#include <map>
#include <string>

#include "risim/dataset.hpp"
#include "risim/setup.hpp"
#include "risim/training.hpp"

namespace risim {

enum class Approach { Exhaustive, Random, NoRis, PosCen, PosInd, ChanCen, ChanInd, PosFl, ChanFl };

inline constexpr Approach kAllApproaches[] = {
    Approach::Exhaustive, Approach::Random,  Approach::NoRis,
    Approach::PosCen,     Approach::PosInd,  Approach::ChanCen,
    Approach::ChanInd,    Approach::PosFl,   Approach::ChanFl};

std::string to_string(Approach a);
Approach approach_from_string(const std::string& name);
bool is_trained(Approach a);
bool is_federated(Approach a);
EncoderKind approach_encoder(Approach a);  // trained approaches only

struct ExperimentConfig {
  SetupSpec setup;
  ClusterConfig clusters;
  TrainHyper hyper;
  std::uint64_t seed = 1;
  std::size_t n_train = 5000;
  std::size_t n_test = 5000;
  std::vector<Approach> approaches{std::begin(kAllApproaches), std::end(kAllApproaches)};
  std::uint64_t oracle_budget = kDefaultOracleBudget;
  std::vector<Eigen::Index> nn_hidden_cen = {256, 128, 16};
  std::vector<Eigen::Index> nn_hidden_ind = {64, 32, 4};
  std::string nn_dims_mode = "table2";  // or "formula": 3MK, 3MK/2, MK0 per RIS count covered
  int fl_rounds = 20;
  int fl_local_epochs = 10;
  double grid_width = 4.0;
  bool grid_center_set = false;
  Vec3 grid_center;  // defaults to the nominal RX of the active setup
  double chan_log_floor = kDefaultLogFloor;

  void validate() const;
  std::vector<Eigen::Index> hidden_for(EncoderKind kind) const;
  RxGrid rx_grid() const;
};

struct ApproachMetrics {
  Approach approach = Approach::Exhaustive;
  std::vector<double> rates;
  double mean_rate = 0.0;
  double normalized = 0.0;  // mean over the exhaustive mean
  double outage5 = 0.0;     // empirical 5% outage rate
};

struct Metrics {
  std::vector<ApproachMetrics> per_approach;
  std::vector<double> thresholds;
  std::vector<std::vector<double>> cdf;  // per approach, aligned with thresholds

  const ApproachMetrics& of(Approach a) const;
};

// P(rate <= t) for each threshold, right continuous empirical CDF.
std::vector<double> outage_cdf(std::span<const double> samples,
                               std::span<const double> thresholds);

double outage_rate(std::span<const double> samples, double probability);

struct TrainedApproach {
  Approach approach = Approach::PosCen;
  ApproachPredictor predictor;
  std::vector<std::vector<double>> loss_curves;
};

struct RunResult {
  Metrics metrics;
  std::vector<TrainedApproach> trained;
  double label_seconds = 0.0;
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
};

// The full protocol: train corpus on the grid placements, test corpus uniform,
// oracle labels for both, train the requested learning approaches, evaluate
// everything per test realization. Exhaustive, random, and no_ris always run.
RunResult run_experiment(const ExperimentConfig& cfg);

// Evaluation half of run_experiment, reusing prebuilt corpora and predictors.
Metrics evaluate(const ExperimentConfig& cfg, const Scene& scene,
                 const std::vector<GroupMap>& maps, const Codebook& cb, const Corpus& test,
                 const std::vector<LabelSet>& test_labels,
                 const std::vector<TrainedApproach>& trained);

// summary.csv, rates.csv, cdf.csv, manifest.txt; byte identical on reruns.
void emit_results(const Metrics& metrics, const std::string& config_echo,
                  const std::string& out_dir);

// Rebuilds summary and CDF tables from a rates.csv produced by emit_results.
Metrics metrics_from_rates_csv(const std::string& path);

std::string render_summary(const Metrics& metrics);

}  // namespace risim
